"""Tests for the bounded search and the named verification campaigns.

Class counts are pinned against a direct scan oracle: enumerate every
column assignment outright with itertools, validate each matrix
through charmat.validate (or validate_mod2), apply the filter through
the characteristic-class engine, and deduplicate by canonical key.
The oracle shares no code with the search tree (no pruning, no
completion schedule), so agreement checks the DFS end to end.  The
frozen numbers below are the oracle's outputs.
"""

import itertools
import json

import pytest

from qtm.charmat import CharMatrix, canonical_key, validate
from qtm.harness import (
    CLAIM_IDS,
    HarnessError,
    ResourceCapExceeded,
    SearchSpec,
    enumerate_matrices,
    verify_claim,
)
from qtm.polytope import cube, polygon, product
from qtm.smallcover import validate_mod2
from qtm.stringcheck import is_spin, is_string


# direct-scan oracle counts, by (polytope, bound, filter, dedup)
SQUARE_B1_VALID_CLASSES = 3
SQUARE_B1_STRING_CLASSES = 1
SQUARE_B2_VALID_CLASSES = 7
SQUARE_B2_SPIN_CLASSES = 3
PENTAGON_B2_VALID_SIGNS = 18
PENTAGON_B2_VALID_FULL = 4  # signs+automorphisms collapses 18 to 4
CUBE_B1_VALID_CLASSES = 31
CUBE_B1_STRING_CLASSES = 4
MOD2_SQUARE_VALID = 3
MOD2_QUAD_TRI_STRING = 8  # matches the raw count in the small cover tests
MOD2_TRI_TRI_STRING = 0

# the lone string class on the square at entry bound 1
SQUARE_B1_STRING_REP = ((1, 0, -1, 0), (0, 1, 0, -1))

# the unique string small cover of the hexagon: the 3-coloring
HEX_THREE_COLORING = ((1, 0, 1, 0, 1, 0), (0, 1, 0, 1, 0, 1))


def test_search_spec_rejects_bad_parameters():
    with pytest.raises(HarnessError):
        SearchSpec(polygon(4), bound=0)
    with pytest.raises(HarnessError):
        SearchSpec(polygon(4), bound=1, filter="odd")
    with pytest.raises(HarnessError):
        SearchSpec(polygon(4), bound=1, dedup="rows")
    with pytest.raises(HarnessError):
        SearchSpec(polygon(4), bound=1, mod2_only=True, dedup="signs+automorphisms")


def test_square_string_search_finds_the_twist_class():
    survivors, stats = enumerate_matrices(
        SearchSpec(polygon(4), 1, "signs", "string")
    )
    assert [lam.rows for lam in survivors] == [SQUARE_B1_STRING_REP]
    assert stats["survivors"] == SQUARE_B1_STRING_CLASSES


def test_square_counts_match_direct_scan():
    survivors, _ = enumerate_matrices(SearchSpec(polygon(4), 1, "signs", "valid"))
    assert len(survivors) == SQUARE_B1_VALID_CLASSES
    survivors, _ = enumerate_matrices(SearchSpec(polygon(4), 2, "signs", "valid"))
    assert len(survivors) == SQUARE_B2_VALID_CLASSES
    survivors, _ = enumerate_matrices(SearchSpec(polygon(4), 2, "signs", "spin"))
    assert len(survivors) == SQUARE_B2_SPIN_CLASSES
    assert all(is_spin(polygon(4), lam) for lam in survivors)


def test_pentagon_valid_class_counts():
    survivors, _ = enumerate_matrices(SearchSpec(polygon(5), 2, "signs", "valid"))
    assert len(survivors) == PENTAGON_B2_VALID_SIGNS
    survivors, _ = enumerate_matrices(
        SearchSpec(polygon(5), 2, "signs+automorphisms", "valid")
    )
    assert len(survivors) == PENTAGON_B2_VALID_FULL


def test_pentagon_has_no_spin_matrices_up_to_bound_three():
    survivors, stats = enumerate_matrices(SearchSpec(polygon(5), 3, "signs", "spin"))
    assert survivors == []
    assert stats["candidates"] == 0  # parity pruning never reaches a leaf


def test_cube_valid_search_is_sound_and_complete():
    p = cube(3)
    survivors, _ = enumerate_matrices(SearchSpec(p, 1, "signs", "valid"))
    assert len(survivors) == CUBE_B1_VALID_CLASSES
    for lam in survivors:
        ok, _bad = validate(p, lam)
        assert ok
    # the product class [I | diag(+-1)] is among the representatives
    assert any(
        all(
            abs(lam.rows[i][i + 3]) == 1
            and all(lam.rows[i][j + 3] == 0 for j in range(3) if j != i)
            for i in range(3)
        )
        for lam in survivors
    )


def test_cube_string_search_matches_direct_scan():
    p = cube(3)
    survivors, _ = enumerate_matrices(SearchSpec(p, 1, "signs", "string"))
    assert len(survivors) == CUBE_B1_STRING_CLASSES
    assert all(is_string(p, lam) for lam in survivors)


def test_enumeration_is_deterministic():
    spec = SearchSpec(polygon(5), 2, "signs+automorphisms", "valid")
    first, stats_first = enumerate_matrices(spec)
    second, stats_second = enumerate_matrices(spec)
    assert [lam.rows for lam in first] == [lam.rows for lam in second]
    assert stats_first == stats_second


def test_mod2_square_valid_count_and_soundness():
    p = polygon(4)
    survivors, _ = enumerate_matrices(
        SearchSpec(p, 1, "signs", "valid", mod2_only=True)
    )
    assert len(survivors) == MOD2_SQUARE_VALID
    assert all(validate_mod2(p, lam) for lam in survivors)


def test_mod2_hexagon_string_search_finds_the_three_coloring():
    survivors, _ = enumerate_matrices(
        SearchSpec(polygon(6), 1, "signs", "string", mod2_only=True)
    )
    assert [lam.rows for lam in survivors] == [HEX_THREE_COLORING]


def test_mod2_polygon_product_string_counts():
    quad_tri = product(polygon(4), polygon(3))
    survivors, _ = enumerate_matrices(
        SearchSpec(quad_tri, 1, "signs", "string", mod2_only=True)
    )
    assert len(survivors) == MOD2_QUAD_TRI_STRING
    tri_tri = product(polygon(3), polygon(3))
    survivors, _ = enumerate_matrices(
        SearchSpec(tri_tri, 1, "signs", "string", mod2_only=True)
    )
    assert len(survivors) == MOD2_TRI_TRI_STRING


def test_node_budget_raises_with_partial_stats():
    with pytest.raises(ResourceCapExceeded) as exc:
        enumerate_matrices(SearchSpec(cube(3), 2, "signs", "valid", max_nodes=100))
    assert exc.value.stats["nodes"] == 101


def test_time_budget_raises():
    with pytest.raises(ResourceCapExceeded) as exc:
        enumerate_matrices(
            SearchSpec(cube(3), 3, "signs", "valid", max_seconds=0.0)
        )
    assert "time" in str(exc.value)
    assert exc.value.stats["nodes"] >= 1


# --- named campaigns -------------------------------------------------------


def test_verify_claim_rejects_unknown_ids():
    assert len(CLAIM_IDS) == 10
    with pytest.raises(HarnessError):
        verify_claim("no-such-claim")


def test_claim_odd_pentagon_is_never_spin():
    rep = verify_claim("odd-gon-not-spin", {"m": 5, "bound": 2})
    assert rep.verdict == "verified"
    assert rep.statistics["survivors"] == 0
    assert rep.witnesses == []
    with pytest.raises(HarnessError):
        verify_claim("odd-gon-not-spin", {"m": 4})


def test_claim_polygon_parity_square():
    rep = verify_claim("polygon-parity", {"m": 4, "bound": 2})
    assert rep.verdict == "verified"
    assert rep.statistics["checked"] == SQUARE_B2_VALID_CLASSES


def test_claim_polygon_bordism_parity_pentagon():
    rep = verify_claim("polygon-bordism-parity", {"m": 5, "bound": 2})
    assert rep.verdict == "verified"
    assert rep.statistics["checked"] == PENTAGON_B2_VALID_SIGNS


def test_claim_cube_string_is_bott_small_bound():
    rep = verify_claim("cube-string-is-bott", {"n": 3, "bound": 1})
    assert rep.verdict == "verified"
    assert rep.statistics["checked"] == CUBE_B1_STRING_CLASSES


def test_claim_cyclic_identities_fixed_seed():
    rep = verify_claim("cyclic-identities", {"k": 3, "trials": 300})
    assert rep.verdict == "verified"
    assert rep.statistics == {"trials": 300, "failures": 0}
    rep = verify_claim("cyclic-identities", {"k": 4, "trials": 100})
    assert rep.verdict == "verified"
    with pytest.raises(HarnessError):
        verify_claim("cyclic-identities", {"k": 2})


def test_claim_prism_decompose_square_prism():
    rep = verify_claim("prism-decompose", {"k": 2, "bound": 1})
    assert rep.verdict == "verified"
    assert rep.statistics["checked"] == CUBE_B1_STRING_CLASSES
    with pytest.raises(HarnessError):
        verify_claim("prism-decompose", {"k": 1})


def test_claim_cube_connsum_smallest_bound():
    rep = verify_claim("cube-connsum", {"bound": 1})
    assert rep.verdict == "verified"
    assert rep.statistics["checked"] == 31  # string classes on the glued cube pair
    assert rep.witnesses == []


def test_claim_c5xc5_never_spin():
    rep = verify_claim("c5xc5-not-spin")
    assert rep.verdict == "verified"
    assert rep.statistics["survivors"] == 0
    assert rep.statistics["candidates"] == 0


def test_claim_product_simplices_obstruction_witnesses():
    rep = verify_claim("product-simplices-obstruction", {"ns": [2]})
    assert rep.verdict == "verified"
    assert rep.witnesses == [{"vertex": [1, 2], "facet": 3}]
    rep = verify_claim("product-simplices-obstruction", {"ns": [1, 2]})
    assert rep.verdict == "verified"
    assert rep.witnesses == [{"vertex": [1, 3, 4], "facet": 5}]
    # cubes carry no such vertex-facet pair, so the claim refuses them
    with pytest.raises(HarnessError):
        verify_claim("product-simplices-obstruction", {"ns": [1, 1, 1]})


def test_claim_smallcover_simplex_products():
    rep = verify_claim("smallcover-simplex-products", {"ns": [3]})
    assert rep.verdict == "verified"
    assert rep.statistics["exists"] is True
    rep = verify_claim("smallcover-simplex-products", {"ns": [2, 2]})
    assert rep.verdict == "verified"
    assert rep.statistics["exists"] is False


def test_claim_resource_cap_gives_capped_verdict():
    rep = verify_claim("cube-string-is-bott", {"n": 3, "bound": 2}, max_nodes=50)
    assert rep.verdict == "resource-capped"
    assert rep.witnesses == []
    assert rep.statistics["nodes"] > 50


def test_claim_report_serializes_to_json():
    rep = verify_claim("polygon-parity", {"m": 3, "bound": 1})
    d = rep.to_dict()
    assert set(d) == {"claim", "params", "verdict", "statistics", "witnesses"}
    assert d["claim"] == "polygon-parity"
    json.dumps(d)

"""Tests for characteristic matrix validation, refinement, and keys."""

import random

import pytest

from qtm import intlin
from qtm.charmat import (
    CharMatrix,
    CharMatrixError,
    ColumnSignFlip,
    FacetPermutation,
    RowBasisChange,
    canonical_key,
    refine,
    transform,
    validate,
    weights_at_vertex,
)
from qtm.polytope import cube, polygon, simplex

# standard valid pairs used throughout
TRIANGLE = simplex(2)
PENTAGON = polygon(5)
PENTAGON_LAM = CharMatrix(
    [[1, 0, -1, -1, 0], [0, 1, 1, 0, -1]], refined_at=(1, 2)
)
CUBE3 = cube(3)


def cp2_matrix(d1, d2):
    return CharMatrix([[1, 0, d1], [0, 1, d2]], refined_at=(1, 2))


def test_validate():
    for d1 in (1, -1):
        for d2 in (1, -1):
            assert validate(TRIANGLE, cp2_matrix(d1, d2)) == (True, None)
    bad = CharMatrix([[1, 0, 2], [0, 1, 1]])
    assert validate(TRIANGLE, bad) == (False, (2, 3))
    assert validate(PENTAGON, PENTAGON_LAM) == (True, None)
    with pytest.raises(CharMatrixError):
        validate(TRIANGLE, CharMatrix([[1, 0], [0, 1]]))


def test_constructor_checks():
    with pytest.raises(CharMatrixError):
        CharMatrix([[1, 0, 1], [0, 1]])
    with pytest.raises(CharMatrixError):
        CharMatrix([[0, 1, 1], [1, 0, 1]], refined_at=(1, 2))
    lam = CharMatrix([[1, 0, 1], [0, 1, 1]])
    assert lam.refined_at is None
    assert lam.column(3) == [1, 1]
    assert lam.entry(2, 3) == 1


def test_refine():
    lam = cp2_matrix(1, 1)
    assert refine(TRIANGLE, lam, (1, 2)).rows == lam.rows
    for d1 in (1, -1):
        for d2 in (1, -1):
            out = refine(TRIANGLE, cp2_matrix(d1, d2), (2, 3))
            assert out.refined_at == (2, 3)
            assert out.column(2) == [1, 0] and out.column(3) == [0, 1]
            # 2x2 inverse worked out by hand: the free column becomes
            # (-d1*d2, d1), a unit vector pair in every sign case
            assert out.column(1) == [-d1 * d2, d1]
            again = refine(TRIANGLE, out, (2, 3))
            assert again.rows == out.rows
    with pytest.raises(CharMatrixError):
        refine(TRIANGLE, cp2_matrix(1, 1), (1, 4))


def test_transform_moves():
    lam = cp2_matrix(1, 1)
    same = transform(TRIANGLE, lam, RowBasisChange(((1, 0), (0, 1))))
    assert same.rows == lam.rows
    flipped = transform(TRIANGLE, lam, ColumnSignFlip(3))
    assert flipped.rows == ((1, 0, -1), (0, 1, -1))
    back = transform(TRIANGLE, flipped, ColumnSignFlip(3))
    assert back.rows == lam.rows
    rot = FacetPermutation((0, 2, 3, 1))
    moved = transform(TRIANGLE, lam, rot)
    assert moved.column(2) == [1, 0] and moved.column(3) == [0, 1]
    with pytest.raises(CharMatrixError):
        transform(TRIANGLE, lam, RowBasisChange(((2, 0), (0, 1))))
    with pytest.raises(CharMatrixError):
        transform(PENTAGON, PENTAGON_LAM, FacetPermutation((0, 2, 1, 3, 4, 5)))


def random_unimodular(rng, n):
    u = intlin.identity(n)
    for _ in range(6):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        for k in range(n):
            u[i][k] += c * u[j][k]
    return tuple(tuple(r) for r in u)


def test_canonical_key_invariance():
    rng = random.Random(3)
    cube_lam = CharMatrix(
        [[1, 0, 0, 1, 0, 0], [0, 1, 0, 0, 1, 2], [0, 0, 1, 0, 0, 1]],
        refined_at=(1, 2, 3),
    )
    for p, lam in ((TRIANGLE, cp2_matrix(1, 1)), (PENTAGON, PENTAGON_LAM), (CUBE3, cube_lam)):
        for group in ("signs", "signs+automorphisms"):
            key = canonical_key(p, lam, group)
            cur = lam
            for _ in range(12):
                kind = rng.randint(0, 2 if group == "signs+automorphisms" else 1)
                if kind == 0:
                    cur = transform(p, cur, ColumnSignFlip(rng.randint(1, p.num_facets)))
                elif kind == 1:
                    cur = transform(p, cur, RowBasisChange(random_unimodular(rng, p.dim)))
                else:
                    cur = transform(p, cur, FacetPermutation(rng.choice(p.automorphisms())))
                assert canonical_key(p, cur, group) == key


def test_canonical_key_separates():
    def family(x, y):
        return CharMatrix(
            [[1, 0, 0, 1, 0, x], [0, 1, 0, 0, 1, y], [0, 0, 1, 0, 0, 1]],
            refined_at=(1, 2, 3),
        )

    k1 = canonical_key(CUBE3, family(0, 2), "signs+automorphisms")
    k2 = canonical_key(CUBE3, family(0, 4), "signs+automorphisms")
    assert k1 != k2


def test_weights_at_vertex():
    w = weights_at_vertex(TRIANGLE, cp2_matrix(1, 1), (2, 3))
    assert w == [[-1, 1], [1, 0]]
    w = weights_at_vertex(TRIANGLE, cp2_matrix(-1, -1), (2, 3))
    assert w == [[-1, 1], [-1, 0]]
    # at a refined vertex the weights are the standard basis
    assert weights_at_vertex(TRIANGLE, cp2_matrix(1, 1), (1, 2)) == [[1, 0], [0, 1]]
    rng = random.Random(5)
    for _ in range(20):
        lam = PENTAGON_LAM
        for _ in range(4):
            lam = transform(PENTAGON, lam, RowBasisChange(random_unimodular(rng, 2)))
        for v in PENTAGON.vertices:
            w = weights_at_vertex(PENTAGON, lam, v)
            assert intlin.mat_mul(w, lam.submatrix(v)) == intlin.identity(2)


def test_serialization():
    lam = cp2_matrix(1, -1)
    assert CharMatrix.from_dict(lam.to_dict()).rows == lam.rows

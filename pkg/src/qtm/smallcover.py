"""Small covers: orientability and the string condition over GF(2).

A small cover is the real analogue of a characteristic pair: the torus
is replaced by its 2-torsion subgroup, so the matrix lives over the
field with two elements and every facet class v_i sits in degree 1 of
the mod-2 cohomology.  The total Stiefel-Whitney class is the product
of (1 + v_i) over all facets and the rational Pontryagin classes
vanish, which collapses the string condition: a small cover is string
exactly when it is orientable (sum of all v_i zero in degree 1) and
the degree-2 class sum_{i<j} v_i v_j vanishes.

The degree-2 presentation mirrors the integral degree-4 one, with one
difference: squares of free generators survive mod 2, so v_j^2 stays a
generator instead of being rewritten.  Generators are the monomials
v_i v_j over free facets i <= j, and each nonface facet pair
contributes one relation after substituting the vertex-column classes
linearly.  A consistency certificate (generator count minus relation
rank equals h_2) is enforced on every call.
"""

from __future__ import annotations

import itertools

from . import intlin
from .polytope import SimplePolytope, product, simplex


class SmallCoverError(ValueError):
    pass


def _mod2_refined_ok(rows, v) -> bool:
    n = len(rows)
    for k, j in enumerate(sorted(v)):
        for i in range(n):
            if rows[i][j - 1] != (1 if i == k else 0):
                return False
    return True


class Mod2CharMatrix:
    """Immutable n x m matrix over GF(2) with 1-based column indexing."""

    __slots__ = ("n", "m", "rows", "refined_at")

    def __init__(self, rows, refined_at=None):
        rows = tuple(tuple(int(x) & 1 for x in r) for r in rows)
        if not rows or not rows[0]:
            raise SmallCoverError("empty matrix")
        if any(len(r) != len(rows[0]) for r in rows):
            raise SmallCoverError("ragged rows")
        self.rows = rows
        self.n = len(rows)
        self.m = len(rows[0])
        if refined_at is not None:
            refined_at = tuple(sorted(refined_at))
            if len(refined_at) != self.n or not _mod2_refined_ok(rows, refined_at):
                raise SmallCoverError(f"columns {refined_at} are not the identity")
        self.refined_at = refined_at

    def __repr__(self):
        return f"<Mod2CharMatrix {self.n}x{self.m} refined_at={self.refined_at}>"

    def __eq__(self, other):
        return isinstance(other, Mod2CharMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def column(self, j: int) -> list[int]:
        return [self.rows[i][j - 1] for i in range(self.n)]

    def entry(self, i: int, j: int) -> int:
        return self.rows[i - 1][j - 1]

    def to_dict(self) -> dict:
        return {"rows_mod2": [list(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> "Mod2CharMatrix":
        return cls(d["rows_mod2"])


def _shape_check(p: SimplePolytope, lam: Mod2CharMatrix) -> None:
    if lam.n != p.dim or lam.m != p.num_facets:
        raise SmallCoverError(
            f"shape {lam.n}x{lam.m} does not match dim {p.dim}, "
            f"facets {p.num_facets}"
        )


def validate_mod2(p: SimplePolytope, lam: Mod2CharMatrix) -> bool:
    """Is every vertex's column submatrix invertible over GF(2)?"""
    _shape_check(p, lam)
    for v in p.vertices:
        masks = [
            intlin.f2_mask([lam.rows[i][j - 1] for j in v]) for i in range(lam.n)
        ]
        if not intlin.f2_det_one(masks, lam.n):
            return False
    return True


def refine_mod2(p: SimplePolytope, lam: Mod2CharMatrix, v) -> Mod2CharMatrix:
    """Row reduce over GF(2) until the columns of vertex v are the identity."""
    v = tuple(sorted(v))
    if not p.is_vertex(v):
        raise SmallCoverError(f"{v} is not a vertex")
    n, m = lam.n, lam.m
    rows = [intlin.f2_mask(list(r)) for r in lam.rows]
    for k, j in enumerate(v):
        c = j - 1
        piv = next((i for i in range(k, n) if rows[i] >> c & 1), None)
        if piv is None:
            raise SmallCoverError(f"vertex {v} is singular over GF(2)")
        rows[k], rows[piv] = rows[piv], rows[k]
        for i in range(n):
            if i != k and rows[i] >> c & 1:
                rows[i] ^= rows[k]
    out = [[rows[i] >> j & 1 for j in range(m)] for i in range(n)]
    return Mod2CharMatrix(out, refined_at=v)


def _refined(p: SimplePolytope, lam: Mod2CharMatrix) -> Mod2CharMatrix:
    if lam.refined_at is not None:
        return lam
    return refine_mod2(p, lam, p.vertices[0])


def is_orientable(p: SimplePolytope, lam: Mod2CharMatrix) -> bool:
    """Orientability: the sum of all facet classes vanishes in degree 1.

    In refined form that is exactly: every column sum is odd.
    """
    _shape_check(p, lam)
    if not validate_mod2(p, lam):
        raise SmallCoverError("matrix is singular at some vertex over GF(2)")
    rl = _refined(p, lam)
    return all(
        sum(rl.rows[i][j] for i in range(rl.n)) % 2 == 1 for j in range(rl.m)
    )


def _substituted_mod2(lam: Mod2CharMatrix) -> dict[int, dict[int, int]]:
    """Each facet class as a GF(2) combination of the free facet classes."""
    v0 = lam.refined_at
    free = [j for j in range(1, lam.m + 1) if j not in set(v0)]
    sub: dict[int, dict[int, int]] = {}
    for k, t in enumerate(sorted(v0)):
        sub[t] = {j: 1 for j in free if lam.rows[k][j - 1]}
    for j in free:
        sub[j] = {j: 1}
    return sub


def degree2_presentation(p: SimplePolytope, lam: Mod2CharMatrix):
    """(generators, relation masks, free facets) of degree-2 mod-2 cohomology.

    Generators are v_i v_j for free i <= j, squares included; each
    nonface pair becomes one relation row, packed as a bitmask over the
    generator list.  The certified identity
    #generators - rank(relations) = h_2 is rechecked on every call.
    """
    _shape_check(p, lam)
    rl = _refined(p, lam)
    sub = _substituted_mod2(rl)
    free = tuple(j for j in range(1, rl.m + 1) if j not in set(rl.refined_at))
    gens = tuple((i, j) for a, i in enumerate(free) for j in free[a:])
    gen_index = {g: k for k, g in enumerate(gens)}
    masks = []
    for a, b in p.nonface_pairs():
        mask = 0
        for i in sub[a]:
            for j in sub[b]:
                key = (i, j) if i <= j else (j, i)
                mask ^= 1 << gen_index[key]
        masks.append(mask)
    rank = intlin.f2_rank(list(masks))
    expected = p.h_vector()[2] if p.dim >= 2 else 0
    if len(gens) - rank != expected:
        raise SmallCoverError(
            f"degree-2 quotient dimension {len(gens) - rank} != h_2 = {expected}"
        )
    return gens, masks, free


def is_string_smallcover(p: SimplePolytope, lam: Mod2CharMatrix) -> bool:
    """String condition: orientable and sum_{i<j} v_i v_j zero in degree 2.

    For small covers this coincides with the spin condition, so there
    is no separate test.
    """
    if not is_orientable(p, lam):
        return False
    rl = _refined(p, lam)
    gens, masks, _free = degree2_presentation(p, rl)
    gen_index = {g: k for k, g in enumerate(gens)}
    sub = _substituted_mod2(rl)
    w2 = 0
    for a in range(1, rl.m + 1):
        for b in range(a + 1, rl.m + 1):
            for i in sub[a]:
                for j in sub[b]:
                    key = (i, j) if i <= j else (j, i)
                    w2 ^= 1 << gen_index[key]
    if w2 == 0:
        return True
    return intlin.f2_in_span(list(masks), w2)


# ---------------------------------------------------------------------------
# products of simplices


def simplex_product(ns) -> tuple[SimplePolytope, tuple]:
    """Product of simplices with its facet blocks.

    Factor i (dimension ns[i]) contributes ns[i] + 1 consecutively
    labeled facets; the returned blocks list them per factor.
    """
    ns = tuple(int(n) for n in ns)
    if not ns or any(n < 1 for n in ns):
        raise SmallCoverError("factor dimensions must be positive")
    poly = simplex(ns[0])
    for n in ns[1:]:
        poly = product(poly, simplex(n))
    blocks = []
    offset = 0
    for n in ns:
        blocks.append(tuple(range(offset + 1, offset + n + 2)))
        offset += n + 1
    return poly, tuple(blocks)


def verify_simplex_product_criterion(ns, cap: int = 7) -> bool:
    """Does a string small cover exist over the product of these simplices?

    All factor dimensions must be at least 2.  The answer is computed
    by exhaustive enumeration over GF(2): in refined form the free
    column of each factor is all-ones on the factor's own rows (forced
    by validity at the single-factor vertices), and the remaining
    cross-factor bits are enumerated.  The outcome is checked against
    the closed form -- existence iff every dimension is odd and some
    dimension is 3 mod 4 -- and a disagreement raises, since it would
    falsify that criterion rather than being a soft result.
    """
    ns = tuple(int(n) for n in ns)
    if not ns or any(n < 2 for n in ns):
        raise SmallCoverError("criterion needs every factor dimension >= 2")
    total = sum(ns)
    if total > cap:
        raise SmallCoverError(
            f"sum of dimensions {total} exceeds the enumeration cap {cap}"
        )
    poly, blocks = simplex_product(ns)
    n, m = poly.dim, poly.num_facets
    k = len(ns)
    # refined at the vertex that omits the last facet of every block
    row_of = {}
    r = 0
    for blk in blocks:
        for f in blk[:-1]:
            row_of[f] = r
            r += 1
    free_cols = tuple(blk[-1] for blk in blocks)
    own_rows = []
    for blk in blocks:
        own_rows.append(tuple(row_of[f] for f in blk[:-1]))
    cross = [
        (t, i) for t, blk in enumerate(blocks) for i in range(n)
        if i not in set(own_rows[t])
    ]
    base = [[0] * m for _ in range(n)]
    for f, i in row_of.items():
        base[i][f - 1] = 1
    for t, blk in enumerate(blocks):
        for i in own_rows[t]:
            base[i][free_cols[t] - 1] = 1
    found = False
    for bits in itertools.product((0, 1), repeat=len(cross)):
        rows = [r[:] for r in base]
        for (t, i), bit in zip(cross, bits):
            rows[i][free_cols[t] - 1] = bit
        lam = Mod2CharMatrix(rows)
        if not validate_mod2(poly, lam):
            continue
        if is_string_smallcover(poly, lam):
            found = True
            break
    expected = all(x % 2 == 1 for x in ns) and any(x % 4 == 3 for x in ns)
    if found != expected:
        raise SmallCoverError(
            f"exhaustive search over {ns} contradicts the parity criterion: "
            f"found={found}, expected={expected}"
        )
    return found

"""Simple polytopes encoded by their facet-subset complexes.

A combinatorial simple n-polytope with m facets is stored as the set of
its vertices, each vertex being the n-subset of facet indices (1..m)
whose facets meet there.  A subset of facet indices is a *face* when it
is contained in some vertex.  Construction validates the simple-polytope
invariants: every vertex has exactly n facets, every facet occurs, and
every (n-1)-subset of a vertex lies in exactly two vertices (the closed
pseudomanifold condition), so malformed complexes fail fast.

Facet indices are 1-based everywhere.  Internally each vertex is also
kept as a bitmask (bit f-1 for facet f) for fast face queries.
"""

from __future__ import annotations

from itertools import combinations


class PolytopeError(ValueError):
    pass


def _mask(facets) -> int:
    m = 0
    for f in facets:
        m |= 1 << (f - 1)
    return m


class SimplePolytope:
    """Immutable combinatorial simple polytope.

    dim       : n
    num_facets: m
    vertices  : sorted tuple of sorted n-tuples of facet indices
    name      : optional human-readable tag set by the constructors
    """

    __slots__ = ("dim", "num_facets", "vertices", "name", "_vmasks", "_vmask_set",
                 "_face_cache", "_edges", "_nonface_pairs", "_auts", "_degrees",
                 "_face_counts")

    def __init__(self, dim: int, num_facets: int, vertices, name: str = ""):
        n, m = dim, num_facets
        if n < 1 or m < n + 1:
            raise PolytopeError(f"impossible dimensions: dim={n}, facets={m}")
        vs = sorted(tuple(sorted(v)) for v in vertices)
        if len(set(vs)) != len(vs):
            raise PolytopeError("duplicate vertices")
        for v in vs:
            if len(v) != n:
                raise PolytopeError(f"vertex {v} does not have {n} facets")
            if v[0] < 1 or v[-1] > m:
                raise PolytopeError(f"vertex {v} uses facet outside 1..{m}")
        used = set()
        for v in vs:
            used.update(v)
        if used != set(range(1, m + 1)):
            raise PolytopeError(f"facets {sorted(set(range(1, m + 1)) - used)} unused")
        # every ridge (an (n-1)-subset of a vertex) must be shared by exactly
        # two vertices; this is what makes the dual complex a closed sphere-like
        # pseudomanifold and rules out boundaries and branching
        ridge_count: dict[tuple, int] = {}
        for v in vs:
            for r in combinations(v, n - 1):
                ridge_count[r] = ridge_count.get(r, 0) + 1
        for r, c in ridge_count.items():
            if c != 2:
                raise PolytopeError(f"ridge {r} lies in {c} vertices, expected 2")
        self.dim = n
        self.num_facets = m
        self.vertices = tuple(vs)
        self.name = name
        self._vmasks = tuple(_mask(v) for v in vs)
        self._vmask_set = frozenset(self._vmasks)
        self._face_cache: dict[int, bool] = {}
        self._edges = None
        self._nonface_pairs = None
        self._auts = None
        self._degrees = None
        self._face_counts = None

    # -- basic queries ------------------------------------------------------

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"<SimplePolytope{tag} dim={self.dim} facets={self.num_facets} vertices={len(self.vertices)}>"

    def __eq__(self, other):
        return (isinstance(other, SimplePolytope)
                and self.dim == other.dim
                and self.num_facets == other.num_facets
                and self.vertices == other.vertices)

    def __hash__(self):
        return hash((self.dim, self.num_facets, self.vertices))

    def is_vertex(self, facets) -> bool:
        return _mask(facets) in self._vmask_set

    def is_face(self, facets) -> bool:
        """Is this set of facet indices a face (contained in some vertex)?"""
        sub = _mask(facets)
        cached = self._face_cache.get(sub)
        if cached is not None:
            return cached
        ans = any(vm & sub == sub for vm in self._vmasks)
        self._face_cache[sub] = ans
        return ans

    @property
    def facet_degrees(self) -> tuple[int, ...]:
        """Number of vertices on each facet, indexed by facet-1."""
        if self._degrees is None:
            deg = [0] * self.num_facets
            for v in self.vertices:
                for f in v:
                    deg[f - 1] += 1
            self._degrees = tuple(deg)
        return self._degrees

    def edges(self) -> list[tuple[int, ...]]:
        """All (n-1)-subsets of facets that are faces, i.e. edges of the polytope."""
        if self._edges is None:
            seen = set()
            for v in self.vertices:
                seen.update(combinations(v, self.dim - 1))
            self._edges = sorted(seen)
        return self._edges

    def edge_endpoints(self, edge) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """The two vertices containing an (n-1)-face, sorted."""
        e = tuple(sorted(edge))
        es = set(e)
        hit = [v for v in self.vertices if es.issubset(v)]
        if len(hit) != 2:
            raise PolytopeError(f"{e} is not an edge")
        return hit[0], hit[1]

    def nonface_pairs(self) -> list[tuple[int, int]]:
        """Sorted list of facet pairs {a, b} that are not faces."""
        if self._nonface_pairs is None:
            self._nonface_pairs = [
                (a, b)
                for a, b in combinations(range(1, self.num_facets + 1), 2)
                if not self.is_face((a, b))
            ]
        return self._nonface_pairs

    # -- face numbers -------------------------------------------------------

    def face_counts(self) -> tuple[int, ...]:
        """c_j = number of j-subsets of facets that are faces, j = 0..n."""
        if self._face_counts is None:
            counts = [0] * (self.dim + 1)
            counts[0] = 1
            for j in range(1, self.dim + 1):
                seen = set()
                for v in self.vertices:
                    seen.update(combinations(v, j))
                counts[j] = len(seen)
            self._face_counts = tuple(counts)
        return self._face_counts

    def f_vector(self) -> tuple[int, ...]:
        """(f_0, ..., f_{n-1}): numbers of i-dimensional faces of the polytope."""
        c = self.face_counts()
        return tuple(c[self.dim - i] for i in range(self.dim))

    def h_vector(self) -> tuple[int, ...]:
        """(h_0, ..., h_n) from expanding sum_j c_j (s-1)^(n-j)."""
        n = self.dim
        c = self.face_counts()
        poly = [0] * (n + 1)  # coefficients of s^0..s^n
        for j in range(n + 1):
            # add c_j * (s-1)^(n-j)
            d = n - j
            coef = 1
            # binomial expansion (s-1)^d = sum_k C(d,k) s^k (-1)^(d-k)
            for k in range(d + 1):
                poly[k] += c[j] * coef * (-1 if (d - k) % 2 else 1)
                coef = coef * (d - k) // (k + 1)
        h = tuple(poly[n - k] for k in range(n + 1))
        if any(x != h[len(h) - 1 - i] for i, x in enumerate(h)):
            raise PolytopeError(f"h-vector {h} is not palindromic")
        return h

    # -- automorphisms and isomorphisms --------------------------------------

    def _adjacency(self) -> list[int]:
        """adj[f] = bitmask of facets sharing a face with facet f (1-based index)."""
        adj = [0] * (self.num_facets + 1)
        for v in self.vertices:
            for a in v:
                for b in v:
                    if a != b:
                        adj[a] |= 1 << (b - 1)
        return adj

    def automorphisms(self) -> list[tuple[int, ...]]:
        """All facet permutations preserving the vertex set.

        Each permutation is a tuple p of length m+1 with p[0] = 0 and
        p[f] = image of facet f.  Brute-force backtracking; guarded to
        m <= 16 which covers every polytope this package constructs.
        """
        if self._auts is None:
            self._auts = find_isomorphisms(self, self)
        return self._auts

    def apply_facet_permutation(self, perm) -> "SimplePolytope":
        """Relabel facets: facet f becomes perm[f]."""
        vs = [tuple(sorted(perm[f] for f in v)) for v in self.vertices]
        return SimplePolytope(self.dim, self.num_facets, vs, name=self.name)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "num_facets": self.num_facets,
            "vertices": [list(v) for v in self.vertices],
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimplePolytope":
        return cls(d["dim"], d["num_facets"], d["vertices"], name=d.get("name", ""))


def find_isomorphisms(p: SimplePolytope, q: SimplePolytope, first_only: bool = False):
    """Facet bijections carrying p's vertex set onto q's.

    Returns a list of permutation tuples (see automorphisms); empty list
    if the polytopes are not combinatorially isomorphic.
    """
    if p.dim != q.dim or p.num_facets != q.num_facets or len(p.vertices) != len(q.vertices):
        return []
    m = p.num_facets
    if m > 16:
        raise PolytopeError("isomorphism search is brute force, refusing m > 16")
    if sorted(p.facet_degrees) != sorted(q.facet_degrees):
        return []
    adj_p = p._adjacency()
    adj_q = q._adjacency()
    deg_p = p.facet_degrees
    deg_q = q.facet_degrees
    # order source facets: rarest degree first to cut branching
    from collections import Counter

    freq = Counter(deg_p)
    order = sorted(range(1, m + 1), key=lambda f: (freq[deg_p[f - 1]], -bin(adj_p[f]).count("1"), f))
    image = [0] * (m + 1)
    used = [False] * (m + 1)
    results: list[tuple[int, ...]] = []

    def extend(k: int) -> bool:
        if k == m:
            perm = tuple(image)
            mapped = {_mask(tuple(perm[f] for f in v)) for v in p.vertices}
            if mapped == q._vmask_set:
                results.append(perm)
                return first_only
            return False
        f = order[k]
        for g in range(1, m + 1):
            if used[g] or deg_q[g - 1] != deg_p[f - 1]:
                continue
            ok = True
            for j in range(k):
                fj = order[j]
                if bool(adj_p[f] >> (fj - 1) & 1) != bool(adj_q[g] >> (image[fj] - 1) & 1):
                    ok = False
                    break
            if not ok:
                continue
            image[f] = g
            used[g] = True
            if extend(k + 1):
                return True
            image[f] = 0
            used[g] = False
        return False

    extend(0)
    return results


def isomorphic(p: SimplePolytope, q: SimplePolytope) -> bool:
    return bool(find_isomorphisms(p, q, first_only=True))


# ---------------------------------------------------------------------------
# constructors


def simplex(n: int) -> SimplePolytope:
    """The n-simplex: n+1 facets, every n-subset a vertex."""
    vs = list(combinations(range(1, n + 2), n))
    return SimplePolytope(n, n + 1, vs, name=f"simplex-{n}")


def polygon(m: int) -> SimplePolytope:
    """The m-gon with edges labeled cyclically 1..m."""
    if m < 3:
        raise PolytopeError("polygon needs at least 3 edges")
    vs = [(i, i + 1) for i in range(1, m)] + [(1, m)]
    return SimplePolytope(2, m, vs, name=f"polygon-{m}")


def cube(n: int) -> SimplePolytope:
    """The n-cube: facet i opposite facet n+i."""
    vs = []
    for bits in range(1 << n):
        vs.append(tuple(sorted((i + 1) + (n if bits >> i & 1 else 0) for i in range(n))))
    return SimplePolytope(n, 2 * n, vs, name=f"cube-{n}")


def prism(s: int) -> SimplePolytope:
    """Prism over an s-gon: facet 1 top, 2..s+1 sides (cyclic), s+2 bottom."""
    if s < 3:
        raise PolytopeError("prism needs an s-gon with s >= 3")
    vs = []
    for i in range(2, s + 2):
        j = i + 1 if i < s + 1 else 2
        vs.append((1, i, j))
        vs.append((i, j, s + 2))
    return SimplePolytope(3, s + 2, vs, name=f"prism-{s}")


_Q_VERTICES = [
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 2, 5),
    (2, 5, 8), (2, 6, 8), (2, 3, 6), (3, 6, 7),
    (3, 4, 7), (4, 5, 8), (4, 7, 8), (6, 7, 8),
]


def q_polytope() -> SimplePolytope:
    """The 3-polytope with 4 quadrilateral and 4 pentagonal facets.

    Combinatorially this is a pentagonal prism with one top edge cut off;
    facet degrees are (4,5,5,5,4,4,4,5).
    """
    return SimplePolytope(3, 8, _Q_VERTICES, name="Q")


# ---------------------------------------------------------------------------
# operations


def product(p: SimplePolytope, q: SimplePolytope) -> SimplePolytope:
    """Cartesian product; q's facets are shifted up by p's facet count."""
    mp = p.num_facets
    vs = []
    for vp in p.vertices:
        for vq in q.vertices:
            vs.append(tuple(sorted(vp + tuple(f + mp for f in vq))))
    name = f"({p.name})x({q.name})" if p.name and q.name else ""
    return SimplePolytope(p.dim + q.dim, mp + q.num_facets, vs, name=name)


def product_splits(p: SimplePolytope) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All facet bipartitions (A, B) realizing p as a product.

    A bipartition works when every vertex splits as (vertex of the
    A-part) + (vertex of the B-part) and all combinations occur.
    Returned with min(A) = 1 to fix the orientation of each pair.
    """
    m = p.num_facets
    if m > 16:
        raise PolytopeError("product split search is exponential, refusing m > 16")
    full = (1 << m) - 1
    out = []
    for amask in range(1, full):
        if not amask & 1:  # fix facet 1 in A so each split appears once
            continue
        bmask = full & ~amask
        if not bmask:
            continue
        aparts = set()
        bparts = set()
        asize = None
        ok = True
        for vm in p._vmasks:
            av = vm & amask
            bv = vm & bmask
            cnt = bin(av).count("1")
            if asize is None:
                asize = cnt
            elif cnt != asize:
                ok = False
                break
            aparts.add(av)
            bparts.add(bv)
        if not ok or asize == 0 or asize == p.dim:
            continue
        if len(aparts) * len(bparts) != len(p.vertices):
            continue
        if not all((a | b) in p._vmask_set for a in aparts for b in bparts):
            continue
        afacets = tuple(f for f in range(1, m + 1) if amask >> (f - 1) & 1)
        bfacets = tuple(f for f in range(1, m + 1) if bmask >> (f - 1) & 1)
        out.append((afacets, bfacets))
    return out


def restrict_to_factor(p: SimplePolytope, facets: tuple[int, ...]) -> tuple[SimplePolytope, dict[int, int]]:
    """The factor polytope on a facet subset of a product split.

    Returns (factor, old->new facet map); new labels follow the old order.
    """
    fset = set(facets)
    relabel = {f: i + 1 for i, f in enumerate(facets)}
    parts = {tuple(sorted(relabel[f] for f in v if f in fset)) for v in p.vertices}
    dim = len(next(iter(parts)))
    factor = SimplePolytope(dim, len(facets), sorted(parts))
    return factor, relabel


def connected_sum(p: SimplePolytope, vp, q: SimplePolytope, vq, matching: dict[int, int] | None = None):
    """Vertex connected sum: delete vertex vp of p and vq of q, glue facets.

    matching maps each facet of vp to its partner in vq; by default the
    sorted orders are matched.  New facet order: p's free facets
    (ascending), the n merged facets (in sorted vp order), q's free
    facets (ascending).  Returns (polytope, p_map, q_map) with the old
    facet -> new facet dictionaries.
    """
    n = p.dim
    if q.dim != n:
        raise PolytopeError("connected sum needs equal dimensions")
    vp = tuple(sorted(vp))
    vq = tuple(sorted(vq))
    if not p.is_vertex(vp) or not q.is_vertex(vq):
        raise PolytopeError("connected sum must glue at vertices")
    if matching is None:
        matching = dict(zip(vp, vq))
    if sorted(matching.keys()) != list(vp) or sorted(matching.values()) != list(vq):
        raise PolytopeError("matching must pair the two glued vertices' facets")
    p_free = [f for f in range(1, p.num_facets + 1) if f not in set(vp)]
    q_free = [f for f in range(1, q.num_facets + 1) if f not in set(vq)]
    p_map = {f: i + 1 for i, f in enumerate(p_free)}
    base = len(p_free)
    for i, f in enumerate(vp):
        p_map[f] = base + i + 1
    q_map = {matching[f]: p_map[f] for f in vp}
    base2 = base + n
    for i, f in enumerate(q_free):
        q_map[f] = base2 + i + 1
    vs = [tuple(sorted(p_map[f] for f in v)) for v in p.vertices if v != vp]
    vs += [tuple(sorted(q_map[f] for f in v)) for v in q.vertices if v != vq]
    name = f"({p.name})#({q.name})" if p.name and q.name else ""
    out = SimplePolytope(n, p.num_facets + q.num_facets - n, vs, name=name)
    return out, p_map, q_map


def edge_connected_sum(p: SimplePolytope, edge_p, ends_p, q: SimplePolytope, edge_q, ends_q):
    """Connected sum along an edge: glue n+1 facets, delete 2 vertices each.

    edge_* is the (n-1)-subset carrying the edge, as an ordered sequence;
    ends_* the pair of remaining endpoint facets, ordered.  Facet i of
    (edge_p + ends_p) is merged with facet i of (edge_q + ends_q).  New
    facet order: the n+1 merged facets (in edge_p + ends_p order), p's
    remaining facets ascending, q's remaining facets ascending.  Returns
    (polytope, p_map, q_map).
    """
    n = p.dim
    if q.dim != n:
        raise PolytopeError("edge connected sum needs equal dimensions")
    ep, eq = tuple(edge_p), tuple(edge_q)
    xp, yp = ends_p
    xq, yq = ends_q
    for poly, e, x, y in ((p, ep, xp, yp), (q, eq, xq, yq)):
        u = tuple(sorted(e + (x,)))
        w = tuple(sorted(e + (y,)))
        if not (poly.is_vertex(u) and poly.is_vertex(w)):
            raise PolytopeError(f"{e} with ends {(x, y)} is not an edge with those endpoints")
    glue_p = list(ep) + [xp, yp]
    glue_q = list(eq) + [xq, yq]
    p_map = {f: i + 1 for i, f in enumerate(glue_p)}
    q_map = {f: i + 1 for i, f in enumerate(glue_q)}
    rest_p = [f for f in range(1, p.num_facets + 1) if f not in p_map]
    for i, f in enumerate(rest_p):
        p_map[f] = n + 2 + i
    base = n + 1 + len(rest_p)
    rest_q = [f for f in range(1, q.num_facets + 1) if f not in q_map]
    for i, f in enumerate(rest_q):
        q_map[f] = base + i + 1
    dead_p = {tuple(sorted(ep + (xp,))), tuple(sorted(ep + (yp,)))}
    dead_q = {tuple(sorted(eq + (xq,))), tuple(sorted(eq + (yq,)))}
    vs = [tuple(sorted(p_map[f] for f in v)) for v in p.vertices if v not in dead_p]
    vs += [tuple(sorted(q_map[f] for f in v)) for v in q.vertices if v not in dead_q]
    if len(vs) != len(set(vs)):
        raise PolytopeError("edge connected sum produced coincident vertices")
    out = SimplePolytope(n, p.num_facets + q.num_facets - n - 1, vs)
    return out, p_map, q_map


def edge_cut_3d(p: SimplePolytope, edge) -> SimplePolytope:
    """Cut off an edge of a 3-polytope, creating a quadrilateral facet m+1."""
    if p.dim != 3:
        raise PolytopeError("edge cut implemented for 3-polytopes")
    a, b = tuple(sorted(edge))
    u, w = p.edge_endpoints((a, b))
    x = next(f for f in u if f not in (a, b))
    y = next(f for f in w if f not in (a, b))
    newf = p.num_facets + 1
    vs = [v for v in p.vertices if v not in (u, w)]
    vs += [tuple(sorted(t)) for t in ((a, x, newf), (b, x, newf), (a, y, newf), (b, y, newf))]
    return SimplePolytope(3, newf, vs)


# ---------------------------------------------------------------------------
# colorings and obstructions


def find_coloring(p: SimplePolytope, k: int) -> list[int] | None:
    """A proper facet k-coloring (facets of a common vertex all distinct),
    as a list color[f-1] in 1..k, or None."""
    m = p.num_facets
    adj = p._adjacency()
    color = [0] * (m + 1)
    order = sorted(range(1, m + 1), key=lambda f: -bin(adj[f]).count("1"))

    def go(i: int) -> bool:
        if i == m:
            return True
        f = order[i]
        taken = {color[g] for g in range(1, m + 1) if adj[f] >> (g - 1) & 1 and color[g]}
        for c in range(1, k + 1):
            if c in taken:
                continue
            color[f] = c
            if go(i + 1):
                return True
            color[f] = 0
        return False

    if not go(0):
        return None
    return color[1:]


def key_obstruction(p: SimplePolytope) -> tuple[tuple[int, ...], int] | None:
    """A vertex v and facet f outside v such that f meets every facet of v.

    With v as initial vertex, no degree-4 relation involves the square of
    f's generator, so that square has a strictly positive first Pontryagin
    coefficient (a sum of squares plus one) that nothing can cancel: no
    characteristic matrix over p gives a string manifold.  Returns the
    lexicographically first such (v, f), or None.
    """
    for v in p.vertices:
        vset = set(v)
        for f in range(1, p.num_facets + 1):
            if f in vset:
                continue
            if all(p.is_face((f, g)) for g in v):
                return v, f
    return None


def three_belts(p: SimplePolytope) -> list[tuple[int, int, int]]:
    """Facet triples, pairwise meeting, with empty triple intersection.

    These are the prismatic 3-circuits of a 3-polytope; a connected sum
    of two 3-polytopes along a vertex is separated by such a belt.
    """
    if p.dim != 3:
        raise PolytopeError("3-belts are defined for 3-polytopes")
    out = []
    for a, b, c in combinations(range(1, p.num_facets + 1), 3):
        if p.is_face((a, b, c)):
            continue
        if p.is_face((a, b)) and p.is_face((a, c)) and p.is_face((b, c)):
            out.append((a, b, c))
    return out

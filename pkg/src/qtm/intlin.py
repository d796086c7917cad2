"""Exact integer linear algebra over Python ints.

Everything here is exact: determinants by fraction-free (Bareiss)
elimination, row Hermite normal form by xgcd row operations, Smith
invariant factors, unimodular solves.  Python integers never overflow,
so there is no precision story to worry about.

Matrices are plain lists of row lists.  Nothing here mutates its
arguments unless the docstring says so.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


def copy_rows(rows: list[list[int]]) -> list[list[int]]:
    return [list(r) for r in rows]


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    nb = len(b)
    cols = len(b[0]) if nb else 0
    out = []
    for ra in a:
        row = [0] * cols
        for k, aik in enumerate(ra):
            if aik:
                rb = b[k]
                for j in range(cols):
                    row[j] += aik * rb[j]
        out.append(row)
    return out


def mat_vec(a: list[list[int]], v: list[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(rows: list[list[int]]) -> list[list[int]]:
    return [list(col) for col in zip(*rows)]


def det(rows: list[list[int]]) -> int:
    """Determinant of a square integer matrix (Bareiss algorithm)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    m = copy_rows(rows)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for s in range(k + 1, n):
                if m[s][k]:
                    m[k], m[s] = m[s], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            ri = m[i]
            rk = m[k]
            for j in range(k + 1, n):
                ri[j] = (pivot * ri[j] - mik * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass
class HermiteForm:
    """Row Hermite normal form of an integer matrix.

    rows    : the reduced rows (zero rows dropped), row-echelon
    pivots  : for each kept row, (column index, pivot value > 0)
    rank    : number of nonzero rows
    """

    rows: list[list[int]]
    pivots: list[tuple[int, int]]

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivot_values(self) -> list[int]:
        return [p for _, p in self.pivots]


def hermite_form(rows: list[list[int]]) -> HermiteForm:
    """Row-style HNF via xgcd row operations.

    Pivots positive, entries above each pivot reduced into [0, pivot).
    """
    work = copy_rows(rows)
    if not work:
        return HermiteForm([], [])
    r, pivots = _hnf_core(work, len(work[0]))
    return HermiteForm(work[:r], pivots)


def hermite_form_with_transform(rows: list[list[int]]) -> tuple[HermiteForm, list[list[int]]]:
    """HNF plus a unimodular U with (U @ rows) = HNF rows padded by zeros.

    The first `rank` rows of U reproduce the HNF rows; the remaining
    rows of U span the left kernel of the input.
    """
    if not rows:
        return HermiteForm([], []), []
    ncols = len(rows[0])
    work = [list(r) + ident for r, ident in zip(rows, identity(len(rows)))]
    r, pivots = _hnf_core(work, ncols)
    h = HermiteForm([w[:ncols] for w in work[:r]], pivots)
    u = [w[ncols:] for w in work]
    return h, u


def _hnf_core(work: list[list[int]], ncols: int) -> tuple[int, list[tuple[int, int]]]:
    """Shared elimination loop; mutates `work`, pivoting on columns < ncols."""
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        # find a row with a nonzero entry in column c
        piv = None
        for i in range(r, len(work)):
            if work[i][c]:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        # clear column c below row r with xgcd combinations
        for i in range(r + 1, len(work)):
            if not work[i][c]:
                continue
            a, b = work[r][c], work[i][c]
            if b % a == 0:
                q = b // a
                work[i] = [x - q * y for x, y in zip(work[i], work[r])]
            else:
                g, x, y = _xgcd(a, b)
                u, v = a // g, b // g
                rr = work[r]
                ri = work[i]
                new_r = [x * p + y * q for p, q in zip(rr, ri)]
                new_i = [-v * p + u * q for p, q in zip(rr, ri)]
                work[r], work[i] = new_r, new_i
        if work[r][c] < 0:
            work[r] = [-x for x in work[r]]
        # reduce entries above the pivot
        p = work[r][c]
        for i in range(r):
            q = work[i][c] // p
            if q:
                work[i] = [x - q * y for x, y in zip(work[i], work[r])]
        pivots.append((c, p))
        r += 1
        if r == len(work):
            break
    return r, pivots


def rank(rows: list[list[int]]) -> int:
    return hermite_form(rows).rank


def in_row_lattice(h: HermiteForm, vec: list[int]) -> bool:
    """Is vec an integer combination of the HNF rows?"""
    v = list(vec)
    for row, (c, p) in zip(h.rows, h.pivots):
        if v[c] % p:
            return False
        q = v[c] // p
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return not any(v)


def in_row_span_q(h: HermiteForm, vec: list[int]) -> bool:
    """Is vec a rational combination of the HNF rows?"""
    v = list(vec)
    for row, (c, p) in zip(h.rows, h.pivots):
        if v[c]:
            # eliminate over Q: scale v by p, subtract v[c] * row
            coef = v[c]
            v = [p * x - coef * y for x, y in zip(v, row)]
    if not any(v):
        return True
    return False


def smith_invariant_factors(rows: list[list[int]]) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    m = [r for r in copy_rows(rows) if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    factors: list[int] = []
    top = 0
    left = 0
    while top < len(m) and left < ncols:
        # find a nonzero entry, move it to (top, left)
        found = None
        for i in range(top, len(m)):
            for j in range(left, ncols):
                if m[i][j]:
                    found = (i, j)
                    break
            if found:
                break
        if not found:
            break
        i, j = found
        m[top], m[i] = m[i], m[top]
        if j != left:
            for r in m:
                r[left], r[j] = r[j], r[left]
        while True:
            # clear column `left` with row xgcd ops
            for i in range(top + 1, len(m)):
                if not m[i][left]:
                    continue
                a, b = m[top][left], m[i][left]
                if b % a == 0:
                    q = b // a
                    m[i] = [x - q * y for x, y in zip(m[i], m[top])]
                else:
                    g, x, y = _xgcd(a, b)
                    u, v = a // g, b // g
                    rt, ri = m[top], m[i]
                    m[top] = [x * p + y * q for p, q in zip(rt, ri)]
                    m[i] = [-v * p + u * q for p, q in zip(rt, ri)]
            # clear row `top` with column xgcd ops
            row_clear = True
            for j in range(left + 1, ncols):
                if not m[top][j]:
                    continue
                a, b = m[top][left], m[top][j]
                if b % a == 0:
                    q = b // a
                    for r in m:
                        r[j] -= q * r[left]
                else:
                    g, x, y = _xgcd(a, b)
                    u, v = a // g, b // g
                    for r in m:
                        pl, pj = r[left], r[j]
                        r[left] = x * pl + y * pj
                        r[j] = -v * pl + u * pj
                    row_clear = False
            if row_clear and all(not m[i][left] for i in range(top + 1, len(m))):
                break
        piv = abs(m[top][left])
        # enforce divisibility: pivot must divide every remaining entry
        bad = None
        for i in range(top + 1, len(m)):
            for j in range(left + 1, ncols):
                if m[i][j] % piv:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            m[top] = [x + y for x, y in zip(m[top], m[bad])]
            continue
        factors.append(piv)
        top += 1
        left += 1
    return factors


def solve_unimodular(a: list[list[int]], b: list[int]) -> list[int]:
    """Solve a @ x = b exactly for square a with det a = +-1.

    Raises ValueError if a is not square-unimodular.  Uses xgcd row
    reduction of the augmented matrix, which stays integral throughout.
    """
    n = len(a)
    if any(len(r) != n for r in a) or len(b) != n:
        raise ValueError("solve_unimodular needs a square system")
    aug = [list(r) + [bv] for r, bv in zip(a, b)]
    h = hermite_form(aug[:])
    # HNF of [a | b] for unimodular a is [I | x]
    if h.rank != n or any(c != i or p != 1 for i, (c, p) in enumerate(h.pivots)):
        raise ValueError("matrix is not unimodular")
    return [h.rows[i][n] for i in range(n)]


def inverse_unimodular(a: list[list[int]]) -> list[list[int]]:
    """Exact inverse of a square integer matrix with det = +-1."""
    n = len(a)
    aug = [list(r) + ident_row for r, ident_row in zip(a, identity(n))]
    h = hermite_form(aug)
    if h.rank != n or any(c != i or p != 1 for i, (c, p) in enumerate(h.pivots)):
        raise ValueError("matrix is not unimodular")
    return [row[n:] for row in h.rows]


# ---------------------------------------------------------------------------
# mod 2: rows as bitmasks (bit j = column j)


def f2_mask(row: list[int]) -> int:
    m = 0
    for j, x in enumerate(row):
        if x & 1:
            m |= 1 << j
    return m


def f2_rank(masks: list[int]) -> int:
    basis: list[int] = []
    for v in masks:
        for b in basis:
            low = b & -b
            if v & low:
                v ^= b
        if v:
            basis.append(v)
            basis.sort(key=lambda x: x & -x)
    return len(basis)


def f2_in_span(masks: list[int], target: int) -> bool:
    basis: list[int] = []
    for v in masks:
        for b in basis:
            if v & (b & -b):
                v ^= b
        if v:
            basis.append(v)
            basis.sort(key=lambda x: x & -x)
    v = target
    for b in basis:
        if v & (b & -b):
            v ^= b
    return v == 0


def f2_det_one(masks: list[int], n: int) -> bool:
    """Is an n x n mod-2 matrix (rows as masks) invertible?"""
    return f2_rank(list(masks)) == n

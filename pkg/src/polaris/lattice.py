"""Exact integer lattice arithmetic: Hermite/Smith normal forms, spans,
saturations and membership tests.

Everything here works on plain Python integers, so results are exact for
any input size.  Lattices are given by generator rows; the canonical form
of a lattice is its row-style Hermite normal form with positive pivots,
which makes equality of lattices a plain tuple comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


def _as_rows(vectors, n):
    rows = [list(map(int, v)) for v in vectors]
    for v in rows:
        if len(v) != n:
            raise ValueError(f"vector {v} does not have length {n}")
    return rows


def is_primitive(v) -> bool:
    """True iff the gcd of the entries of the nonzero vector ``v`` is 1."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        raise ValueError("degenerate slope: zero vector")
    return g == 1


def hnf(vectors, n):
    """Row-style Hermite normal form of the span of ``vectors`` in Z^n.

    Returns a tuple of row tuples: pivots positive, entries above each
    pivot reduced into [0, pivot), zero rows dropped, rows ordered by
    pivot column.  Two generator sets span the same lattice iff their
    forms are equal.
    """
    rows = [r for r in _as_rows(vectors, n) if any(r)]
    m = len(rows)
    pivot_rows = []
    row = 0
    for col in range(n):
        # find a row with smallest nonzero |entry| in this column
        best = None
        for i in range(row, m):
            e = rows[i][col]
            if e != 0 and (best is None or abs(e) < abs(rows[best][col])):
                best = i
        if best is None:
            continue
        rows[row], rows[best] = rows[best], rows[row]
        # clear the column below by repeated division
        while True:
            dirty = False
            for i in range(row + 1, m):
                e = rows[i][col]
                if e != 0:
                    qq = e // rows[row][col]
                    rows[i] = [a - qq * b for a, b in zip(rows[i], rows[row])]
                    if rows[i][col] != 0:
                        rows[row], rows[i] = rows[i], rows[row]
                        dirty = True
            if not dirty:
                break
        if rows[row][col] < 0:
            rows[row] = [-a for a in rows[row]]
        pivot_rows.append((row, col))
        row += 1
        if row == m:
            break
    # reduce entries above each pivot
    for r, c in reversed(pivot_rows):
        p = rows[r][c]
        for i in range(r):
            qq = rows[i][c] // p
            if qq:
                rows[i] = [a - qq * b for a, b in zip(rows[i], rows[r])]
    return tuple(tuple(r) for r in rows[: len(pivot_rows)])


def smith_diagonal(vectors, n):
    """Diagonal of the Smith normal form of the matrix with rows ``vectors``.

    Returns the list of nonzero invariant factors d_1 | d_2 | ... (positive).
    """
    d, _ = _smith_with_colinv(vectors, n)
    return d


def _smith_with_colinv(vectors, n):
    """Smith diagonalization tracking W = V^{-1} for A = U^{-1} D W.

    Row operations change only U; a column operation A -> A E updates
    W -> E^{-1} W.  The first r rows of W then span the saturation of the
    row span of A.
    """
    a = _as_rows(vectors, n)
    m = len(a)
    w = [[int(i == j) for j in range(n)] for i in range(n)]
    d = []

    def col_add(j, i, c):  # col_j += c*col_i ; W: row_i -= c*row_j
        for r in range(m):
            a[r][j] += c * a[r][i]
        w[i] = [x - c * y for x, y in zip(w[i], w[j])]

    def col_swap(i, j):
        for r in range(m):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        w[i], w[j] = w[j], w[i]

    def col_neg(i):
        for r in range(m):
            a[r][i] = -a[r][i]
        w[i] = [-x for x in w[i]]

    top = 0
    left = 0
    while top < m and left < n:
        # locate smallest nonzero entry in the remaining block
        best = None
        for i in range(top, m):
            for j in range(left, n):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        a[top], a[bi] = a[bi], a[top]
        if bj != left:
            col_swap(left, bj)
        while True:
            # clear row and column at the pivot
            done = True
            for j in range(left + 1, n):
                if a[top][j] != 0:
                    qq = a[top][j] // a[top][left]
                    col_add(j, left, -qq)
                    if a[top][j] != 0:
                        col_swap(left, j)
                        done = False
            for i in range(top + 1, m):
                if a[i][left] != 0:
                    qq = a[i][left] // a[top][left]
                    a[i] = [x - qq * y for x, y in zip(a[i], a[top])]
                    if a[i][left] != 0:
                        a[top], a[i] = a[i], a[top]
                        done = False
            if done:
                break
        if a[top][left] < 0:
            col_neg(left)
        d.append(a[top][left])
        top += 1
        left += 1
    # enforce the divisibility chain d_1 | d_2 | ...
    changed = True
    while changed:
        changed = False
        for i in range(len(d) - 1):
            if d[i + 1] % d[i] != 0:
                g = gcd(d[i], d[i + 1])
                d[i + 1] = d[i] * d[i + 1] // g
                d[i] = g
                changed = True
    return d, [tuple(r) for r in w]


@dataclass(frozen=True)
class SpanResult:
    """Saturated span of a set of integer vectors.

    ``basis`` is the HNF basis of the saturation, ``raw_basis`` the HNF
    basis of the plain integer span, ``index`` the index of the raw span
    inside its saturation (product of the invariant factors).
    """

    rank: int
    basis: tuple
    raw_basis: tuple
    index: int


def lattice_span(vectors, n) -> SpanResult:
    """Saturation of the integer span of ``vectors`` inside Z^n.

    The empty input yields the rank-0 lattice.  The result does not
    depend on the order of the generators.
    """
    rows = _as_rows(vectors, n)
    raw = hnf(rows, n)
    if not raw:
        return SpanResult(rank=0, basis=(), raw_basis=(), index=1)
    d, w = _smith_with_colinv(list(raw), n)
    r = len(d)
    sat = hnf(w[:r], n)
    index = 1
    for x in d:
        index *= x
    return SpanResult(rank=r, basis=sat, raw_basis=raw, index=index)


def full_lattice(n):
    """HNF basis of Z^n itself."""
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def coords_in(basis, v):
    """Integer coordinates of ``v`` in the given HNF ``basis``, or None.

    ``basis`` must be in row HNF (as produced by :func:`hnf`).
    """
    v = list(map(int, v))
    n = len(v)
    coeffs = []
    pivots = []
    for row in basis:
        col = next(j for j in range(n) if row[j] != 0)
        pivots.append(col)
    for row, col in zip(basis, pivots):
        if v[col] % row[col] != 0:
            return None
        c = v[col] // row[col]
        v = [a - c * b for a, b in zip(v, row)]
        coeffs.append(c)
    if any(v):
        return None
    return coeffs


def contains(basis, vectors):
    """True iff every vector lies in the lattice spanned by ``basis``."""
    return all(coords_in(basis, v) is not None for v in vectors)


def det2(u, v) -> int:
    """Determinant of the 2x2 matrix with rows ``u``, ``v``."""
    return int(u[0]) * int(v[1]) - int(u[1]) * int(v[0])

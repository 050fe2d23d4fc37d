"""Exact integer linear algebra on small dense matrices (Python ints).

Matrices are lists of rows.  Everything here is exact; sizes are desk
scale (tens of rows and columns), so plain Python integers are used rather
than fixed-width arrays.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


def _copy(m: Sequence[Sequence[int]]) -> Matrix:
    return [[int(x) for x in row] for row in m]


def transpose(m: Sequence[Sequence[int]]) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free elimination."""
    a = _copy(m)
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def rank(m: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals."""
    a = [[Fraction(x) for x in row] for row in m]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            if a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def column_hermite(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, list[int]]:
    """Column-style echelon form ``H = M U`` with ``U`` unimodular.

    Returns ``(H, U, pivot_rows)``.  The first ``len(pivot_rows)`` columns of
    ``H`` are nonzero with positive pivots in increasing rows; the remaining
    columns are zero, so the matching columns of ``U`` span the integer
    kernel of ``M``.
    """
    h = _copy(m)
    rows = len(h)
    cols = len(h[0]) if rows else 0
    u = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a col_j + b col_k, c col_j + d col_k)
        for mat in (h, u):
            for row in mat:
                x, y = row[j], row[k]
                row[j], row[k] = a * x + b * y, c * x + d * y

    pivots = []
    c = 0
    for r in range(rows):
        if c >= cols:
            break
        for k in range(c + 1, cols):
            if h[r][k] == 0:
                continue
            x, y = h[r][c], h[r][k]
            g, s, t = _xgcd(x, y)
            # unimodular: det [[s, t], [-y/g, x/g]] = (s x + t y)/g = 1
            colop(c, k, s, t, -y // g, x // g)
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            for mat in (h, u):
                for row in mat:
                    row[c] = -row[c]
        piv = h[r][c]
        for j in range(c):
            q = h[r][j] // piv
            if q:
                for mat in (h, u):
                    for row in mat:
                        row[j] -= q * row[c]
        pivots.append(r)
        c += 1
    return h, u, pivots


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s a + t b = g = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def integer_kernel(m: Sequence[Sequence[int]], reduce: bool = True) -> Matrix:
    """Z-basis of ``{x in Z^N : M x = 0}`` as a list of vectors.

    With ``reduce`` the basis is LLL-reduced, which keeps the relations short
    and the resulting box operators readable.
    """
    if not m:
        return []
    cols = len(m[0])
    _, u, pivots = column_hermite(m)
    r = len(pivots)
    basis = [[u[i][j] for i in range(cols)] for j in range(r, cols)]
    if reduce and len(basis) > 1:
        basis = lll_reduce(basis)
    return [_normalize_sign(v) for v in basis]


def _normalize_sign(v: list[int]) -> list[int]:
    for x in v:
        if x:
            return v if x > 0 else [-y for y in v]
    return v


def lattice_index(m: Sequence[Sequence[int]]) -> int:
    """Index of the column lattice of ``M`` in ``Z^rows``; 0 if rank-deficient."""
    h, _, pivots = column_hermite(m)
    if len(pivots) < len(m):
        return 0
    idx = 1
    for j, r in enumerate(pivots):
        idx *= h[r][j]
    return abs(idx)


def generates_full_lattice(m: Sequence[Sequence[int]]) -> bool:
    """True iff the columns of ``M`` generate ``Z^rows`` as a group."""
    return lattice_index(m) == 1


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> Matrix:
    """Textbook LLL on linearly independent integer rows, exact arithmetic."""
    b = _copy(basis)
    n = len(b)
    if n <= 1:
        return b

    def dot(x, y):
        return sum(p * q for p, q in zip(x, y))

    def gram_schmidt():
        bstar, mu = [], [[Fraction(0)] * n for _ in range(n)]
        norms = []
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = Fraction(dot(b[i], bstar[j])) / norms[j] if norms[j] else Fraction(0)
                v = [p - mu[i][j] * q for p, q in zip(v, bstar[j])]
            bstar.append(v)
            norms.append(dot(v, v))
        return mu, norms

    mu, norms = gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                # size reduction leaves b* unchanged; only row k of mu moves
                for i in range(j):
                    mu[k][i] -= q * mu[j][i]
                mu[k][j] -= q
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, norms = gram_schmidt()
            k = max(k - 1, 1)
    return b


def cofactor_normal(rows: Sequence[Sequence[int]]) -> list[int]:
    """Integer normal to ``d-1`` vectors in ``Z^d`` via signed maximal minors."""
    d = len(rows[0])
    if len(rows) != d - 1:
        raise ValueError("need exactly d-1 vectors")
    out = []
    for k in range(d):
        minor = [[row[j] for j in range(d) if j != k] for row in rows]
        out.append((-1) ** k * bareiss_det(minor))
    return out


def primitive(v: Sequence[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        return [int(x) for x in v]
    return [int(x) // g for x in v]

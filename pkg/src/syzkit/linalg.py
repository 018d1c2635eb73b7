"""Exact linear algebra over Q(i): fraction-free elimination, rank, kernel.

Two independent elimination routes are kept side by side: Bareiss
(fraction-free over Gaussian integers after clearing denominators) and plain
field elimination.  Pivoting is deterministic (first nonzero entry in row-major
scan) so kernels and representatives are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .coeffring import GaussianRational, ONE, ZERO, Poly

Matrix = list[list[GaussianRational]]


def copy_matrix(m: Sequence[Sequence[GaussianRational]]) -> Matrix:
    return [list(row) for row in m]


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return []
    out = zeros(len(a), len(b[0]))
    for i, row in enumerate(a):
        for k, x in enumerate(row):
            if not x:
                continue
            br = b[k]
            for j, y in enumerate(br):
                if y:
                    out[i][j] = out[i][j] + x * y
    return out


def _clear_denominators(m: Matrix) -> Matrix:
    out = []
    for row in m:
        lcm = 1
        for x in row:
            lcm = lcm * x.re.denominator // _gcd(lcm, x.re.denominator)
            lcm = lcm * x.im.denominator // _gcd(lcm, x.im.denominator)
        out.append([x * lcm for x in row])
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def bareiss_echelon(m: Sequence[Sequence[GaussianRational]]) -> tuple[Matrix, list[int]]:
    """Fraction-free row echelon form; returns (echelon, pivot columns).

    Rows are scaled to Gaussian integers first; every division in the
    Bareiss update is exact in Z[i].
    """
    a = _clear_denominators(copy_matrix(m))
    rows = len(a)
    cols = len(a[0]) if rows else 0
    piv_cols: list[int] = []
    r = 0
    prev = ONE
    for c in range(cols):
        pr = None
        for i in range(r, rows):
            if a[i][c]:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            a[r], a[pr] = a[pr], a[r]
        pivot = a[r][c]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                num = a[i][j] * pivot - a[i][c] * a[r][j]
                q = num / prev
                _assert_gaussian_integer(q)
                a[i][j] = q
            a[i][c] = ZERO
        prev = pivot
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    return a, piv_cols


def _assert_gaussian_integer(x: GaussianRational) -> None:
    if x.re.denominator != 1 or x.im.denominator != 1:
        raise ArithmeticError("Bareiss division was not exact")


def rank_bareiss(m: Sequence[Sequence[GaussianRational]]) -> int:
    if not m or not m[0]:
        return 0
    _, piv = bareiss_echelon(m)
    return len(piv)


def rref(m: Sequence[Sequence[GaussianRational]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form by plain field elimination."""
    a = copy_matrix(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    piv_cols: list[int] = []
    r = 0
    for c in range(cols):
        pr = None
        for i in range(r, rows):
            if a[i][c]:
                pr = i
                break
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = ONE / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    return a, piv_cols


def rank(m: Sequence[Sequence[GaussianRational]]) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def nullspace(m: Sequence[Sequence[GaussianRational]]) -> list[list[GaussianRational]]:
    """Basis of the right kernel, one vector per free column (deterministic)."""
    if not m:
        return []
    cols = len(m[0])
    red, piv = rref(m)
    piv_set = set(piv)
    basis = []
    for free in range(cols):
        if free in piv_set:
            continue
        v = [ZERO] * cols
        v[free] = ONE
        for r, pc in enumerate(piv):
            v[pc] = -red[r][free]
        basis.append(v)
    return basis


def solve(m: Sequence[Sequence[GaussianRational]], b: Sequence[GaussianRational]) -> Optional[list[GaussianRational]]:
    """One exact solution of m x = b, or None if inconsistent."""
    if not m:
        return [] if not any(b) else None
    cols = len(m[0])
    aug = [list(row) + [bv] for row, bv in zip(m, b)]
    red, piv = rref(aug)
    for r in range(len(red)):
        if all(not x for x in red[r][:cols]) and red[r][cols]:
            return None
    x = [ZERO] * cols
    for r, pc in enumerate(piv):
        if pc == cols:
            return None
        x[pc] = red[r][cols]
    return x


def column_space_pivots(columns: list[list[GaussianRational]]) -> list[int]:
    """Indices of columns forming a basis of the span (in input order)."""
    if not columns:
        return []
    rows = len(columns[0])
    mat = [[columns[j][i] for j in range(len(columns))] for i in range(rows)]
    _, piv = rref(mat)
    return piv


def invert(m: Sequence[Sequence[GaussianRational]]) -> Matrix:
    n = len(m)
    aug = [list(row) + list(identity(n)[i]) for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ArithmeticError("matrix is singular")
    return [row[n:] for row in red]


# -- polynomial matrices ---------------------------------------------------


def poly_det(m: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a Poly matrix by column-subset dynamic programming
    (division-free)."""
    n = len(m)
    if n == 0:
        return Poly.constant(1)
    prev = {0: Poly.constant(1)}
    for i in range(n):
        cur: dict[int, Poly] = {}
        for mask, val in prev.items():
            if val.is_zero():
                continue
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    continue
                e = m[i][j]
                if e.is_zero():
                    continue
                add = val * e
                # new inversions: previously used columns larger than j
                if (mask >> (j + 1)).bit_count() & 1:
                    add = -add
                k = mask | bit
                cur[k] = cur.get(k, Poly()) + add
        prev = {k: v for k, v in cur.items() if not v.is_zero()}
    return prev.get((1 << n) - 1, Poly())


def poly_matrix_inverse_unit_det(m: Sequence[Sequence[Poly]]) -> list[list[Poly]]:
    """Inverse of a Poly matrix whose determinant is a nonzero constant.

    Computed as adjugate / det, which stays polynomial exactly in this case.
    """
    n = len(m)
    det = poly_det(m)
    if not det.is_constant() or det.is_zero():
        raise ArithmeticError(f"determinant {det} is not a nonzero constant")
    dinv = ONE / det.constant_value()
    out = [[Poly() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [m[r][c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            cof = poly_det(minor)
            if (i + j) & 1:
                cof = -cof
            out[j][i] = cof * dinv
    return out

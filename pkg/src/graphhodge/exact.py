"""Exact linear algebra over the rationals.

Matrices are lists of lists of Fraction.  Sizes in this package are tiny
(cohomology of a handful of pieces), so clarity wins over speed; ranks are
still computed fraction-free (Bareiss) on integer-cleared matrices so no
floating point threshold ever decides a dimension.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

FMatrix = list[list[Fraction]]


def fmatrix(rows, ncols=None) -> FMatrix:
    out = [[Fraction(x) for x in row] for row in rows]
    if not out and ncols is not None:
        return []
    return out


def zeros(nrows: int, ncols: int) -> FMatrix:
    return [[Fraction(0)] * ncols for _ in range(nrows)]


def shape(m: FMatrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def _clear_denominators(m: FMatrix) -> list[list[int]]:
    out = []
    for row in m:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // gcd(lcm, x.denominator)
        out.append([int(x * lcm) for x in row])
    return out


def rank(m: FMatrix) -> int:
    """Fraction-free (Bareiss) rank of a rational matrix."""
    a = _clear_denominators(m)
    if not a or not a[0]:
        return 0
    nrows, ncols = len(a), len(a[0])
    prev = 1
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, nrows):
            if a[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nrows):
            for j in range(col + 1, ncols):
                a[i][j] = (a[r][col] * a[i][j] - a[i][col] * a[r][j]) // prev
            a[i][col] = 0
        prev = a[r][col]
        r += 1
        if r == nrows:
            break
    return r


def rref(m: FMatrix) -> tuple[FMatrix, list[int]]:
    """Reduced row echelon form and pivot column indices."""
    a = [row[:] for row in m]
    nrows, ncols = shape(a)
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, nrows):
            if a[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return a, pivots


def nullspace(m: FMatrix, ncols: int) -> FMatrix:
    """Canonical basis of ker(m), one row per basis vector.

    The basis comes from the RREF free columns, so it is unique for a
    given column ordering (the reduced echelon convention).
    """
    if not m:
        return [[Fraction(1) if j == i else Fraction(0) for j in range(ncols)]
                for i in range(ncols)]
    red, pivots = rref(m)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return basis


def transpose(m: FMatrix) -> FMatrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a: FMatrix, b: FMatrix) -> FMatrix:
    if not a or not b:
        return []
    nb = len(b[0])
    return [[sum((x * b[k][j] for k, x in enumerate(row)), Fraction(0))
             for j in range(nb)] for row in a]

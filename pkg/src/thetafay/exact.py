"""Exact integer linear algebra by fraction-free (Bareiss) elimination."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def _as_int_rows(mat: Sequence[Sequence[int]]) -> list[list[int]]:
    rows = [list(map(int, r)) for r in mat]
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def rref_fraction_free(mat: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int], int]:
    """Fraction-free Gauss-Jordan elimination.

    Returns ``(R, pivots, d)``: ``R`` is row-equivalent to ``mat`` with every
    pivot entry equal to ``d`` and zeros elsewhere in pivot columns, so
    ``R / d`` is the reduced row echelon form. All divisions are exact.
    """
    R = _as_int_rows(mat)
    nrows = len(R)
    ncols = len(R[0]) if nrows else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if R[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            R[r], R[piv] = R[piv], R[r]
        prow = R[r]
        p = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            row = R[i]
            f = row[c]
            if f == 0:
                if p != prev:
                    R[i] = [(p * x) // prev for x in row]
                continue
            R[i] = [(p * x - f * y) // prev for x, y in zip(row, prow)]
        pivots.append(c)
        prev = p
        r += 1
    return R, pivots, prev


def rank(mat: Sequence[Sequence[int]]) -> int:
    if not mat:
        return 0
    return len(rref_fraction_free(mat)[1])


def primitive(v: Sequence[int]) -> list[int]:
    """Divide out the content and make the first nonzero entry positive."""
    v = [int(x) for x in v]
    c = 0
    for x in v:
        c = gcd(c, x)
    if c == 0:
        return v
    first = next(x for x in v if x)
    if first < 0:
        c = -c
    return [x // c for x in v]


def integer_vector(v: Sequence) -> list[int]:
    """Clear denominators of a rational vector (ints or Fractions)."""
    fr = [Fraction(x) for x in v]
    den = lcm(*(x.denominator for x in fr)) if fr else 1
    return [int(x * den) for x in fr]


def nullspace(mat: Sequence[Sequence[int]]) -> list[list[int]]:
    """Integer basis of {v : mat v = 0}, one primitive vector per free column."""
    R, pivots, d = rref_fraction_free(mat)
    ncols = len(R[0]) if R else 0
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = d
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        basis.append(primitive(v))
    return basis


def matmul(X: Sequence[Sequence[int]], Y: Sequence[Sequence[int]]) -> list[list[int]]:
    cols = list(zip(*Y))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in X]


def matvec(X: Sequence[Sequence[int]], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in X]

from math import lcm

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from thetafay import exact


def _sympy_nullspace(rows):
    basis = sympy.Matrix(rows).nullspace()
    out = []
    for v in basis:
        den = lcm(*(int(sympy.fraction(x)[1]) for x in v))
        out.append(exact.primitive([int(x * den) for x in v]))
    return out


matrices = st.integers(1, 6).flatmap(
    lambda n: st.integers(1, 7).flatmap(
        lambda m: st.lists(st.lists(st.integers(-4, 4), min_size=m, max_size=m),
                           min_size=n, max_size=n)))


@settings(max_examples=80, deadline=None)
@given(rows=matrices)
def test_against_sympy(rows):
    assert exact.rank(rows) == sympy.Matrix(rows).rank()
    assert exact.nullspace(rows) == _sympy_nullspace(rows)
    for v in exact.nullspace(rows):
        assert all(x == 0 for x in exact.matvec(rows, v))


def test_rref_scaled_identity_on_pivots():
    R, pivots, d = exact.rref_fraction_free([[2, 4, 1], [1, 3, 5], [3, 7, 6]])
    assert pivots == [0, 1]
    for i, c in enumerate(pivots):
        assert [R[j][c] for j in range(3)] == [d if j == i else 0 for j in range(3)]
    assert R[2] == [0, 0, 0]


def test_fay_like_kernel():
    # M - 2I and M + I for the genus-1 even operator
    rows = [[-1, 1, 1], [1, -1, -1], [1, -1, -1]]
    assert exact.nullspace(rows) == [[1, 1, 0], [1, 0, 1]]
    assert exact.nullspace([[2, 1, 1], [1, 2, -1], [1, -1, 2]]) == [[1, -1, -1]]


def test_helpers():
    assert exact.primitive([0, -4, 6]) == [0, 2, -3]
    assert exact.primitive([0, 0]) == [0, 0]
    from fractions import Fraction
    assert exact.integer_vector([Fraction(1, 2), Fraction(-1, 3), 1]) == [3, -2, 6]
    assert exact.matmul([[1, 2]], [[3], [4]]) == [[11]]
    assert exact.rank([]) == 0
    with pytest.raises(ValueError):
        exact.rank([[1, 2], [3]])


def test_large_entries_stay_exact():
    rng = np.random.default_rng(0)
    A = rng.integers(-10**6, 10**6, size=(8, 10)).tolist()
    for v in exact.nullspace(A):
        assert exact.matvec(A, v) == [0] * 8
    assert len(exact.nullspace(A)) == 2

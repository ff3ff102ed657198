from fractions import Fraction

import numpy as np
import pytest

from thetafay.chargeom import (
    Characteristic,
    F2Matrix,
    SymplecticF2,
    affine_action,
    char_index,
    characteristics,
    epsilon,
    swap_J,
    translation,
)
from thetafay.indrep import (
    InducedFunction,
    character,
    character_norm,
    character_values,
    rep_matrix,
    verify_basis_welldefined,
)
from thetafay.symgroup import enumerate_group, random_element

C = Characteristic.parse


def test_identity_and_J():
    assert np.array_equal(rep_matrix(SymplecticF2.identity(2), "even").to_numpy(), np.eye(10))
    P = rep_matrix(swap_J(1), "even").to_numpy()
    # order (0;0), (0;1), (1;0): swap the last two, all signs -1
    assert P.tolist() == [[-1, 0, 0], [0, 0, -1], [0, -1, 0]]


def test_translation_matches_primitives():
    T = translation(F2Matrix.from_lists([[1]]))
    R = rep_matrix(T, "even")
    idx = char_index(1, "even")
    for i, m in enumerate(characteristics(1, "even")):
        assert R.perm[i] == idx[affine_action(T, m)]
        assert R.signs[i] == epsilon(T, m)
    # (a; b) -> (a; a + b + 1): (0;0) <-> (0;1), (1;0) fixed
    assert affine_action(T, C("0|0")) == C("0|1")
    assert affine_action(T, C("1|0")) == C("1|0")
    assert R.trace() == epsilon(T, C("1|0")) == -1


@pytest.mark.parametrize("sector", ["even", "odd"])
def test_homomorphism(sector):
    rng = np.random.default_rng(11)
    for _ in range(20):
        s, t = random_element(3, rng), random_element(3, rng)
        lhs = rep_matrix(t @ s, sector)
        assert lhs == rep_matrix(t, sector) @ rep_matrix(s, sector)
        assert np.array_equal(lhs.to_numpy(),
                              rep_matrix(t, sector).to_numpy() @ rep_matrix(s, sector).to_numpy())


def test_batch_character_matches_scalar():
    enum = enumerate_group(2)
    rows = enum.rows
    for sector in ("even", "odd"):
        batch = character_values(rows, 2, sector)
        scalar = [character(enum.element(i), sector) for i in range(len(enum))]
        assert batch.tolist() == scalar
        assert batch.tolist() == [rep_matrix(enum.element(i), sector).trace()
                                  for i in range(len(enum))]


@pytest.mark.parametrize("g,sector,signed,norm", [
    (1, "even", True, 2), (1, "even", False, 2), (1, "odd", True, 1),
    (2, "even", True, 2), (2, "odd", True, 2), (2, "even", False, 2), (2, "odd", False, 2)])
def test_character_norms(g, sector, signed, norm):
    assert character_norm(g, sector, signed) == Fraction(norm)


def test_induced_function():
    m = C("01|00")
    f = InducedFunction(m)
    assert f(f.t) == epsilon(f.t, m)
    outside = next(s for s in (random_element(2, np.random.default_rng(i)) for i in range(50))
                   if not f.in_support(s))
    assert f(outside) == 0
    with pytest.raises(ValueError):
        InducedFunction(m, SymplecticF2.identity(2))


@pytest.mark.parametrize("text", ["00|00", "01|10", "10|00", "11|11", "10|10"])
def test_basis_well_defined(text):
    assert verify_basis_welldefined(C(text), trials=10, rng=np.random.default_rng(2))

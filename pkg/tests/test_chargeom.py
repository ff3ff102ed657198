import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetafay.chargeom import (
    BitVec,
    Characteristic,
    F2Matrix,
    GenusMismatch,
    Parity,
    SingularMatrix,
    SymplecticF2,
    affine_action,
    characteristics,
    count,
    epsilon,
    form_J,
    is_symplectic,
    odd_base,
    pairing_e,
    parity,
    swap_J,
    translation,
)
from thetafay.symgroup import random_element

C = Characteristic.parse


def test_parity_examples():
    assert parity(C("0|0")) is Parity.EVEN
    assert parity(C("1|1")) is Parity.ODD
    assert parity(odd_base(3)) is Parity.ODD


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_counts(g):
    assert count(g, "even") == 2 ** (g - 1) * (2 ** g + 1)
    assert count(g, "odd") == 2 ** (g - 1) * (2 ** g - 1)
    assert len(characteristics(g)) == 4 ** g


def test_canonical_order_is_lexicographic():
    strings = ["".join(map(str, c.a.to_list() + c.b.to_list())) for c in characteristics(2)]
    assert strings == sorted(strings)
    assert [str(m) for m in characteristics(1, "even")] == ["0|0", "0|1", "1|0"]


def test_parse_roundtrip_and_errors():
    for m in characteristics(2):
        assert C(str(m)) == m
        assert Characteristic.from_code(2, m.code) == m
    for bad in ("01|1", "2|0", "01", ""):
        with pytest.raises(ValueError):
            C(bad)


def test_pairing_examples():
    for m in characteristics(2):
        assert pairing_e(m, m) == 1
    assert pairing_e(C("0|1"), C("1|0")) == -1
    chars = characteristics(1, "even")
    assert [[pairing_e(m, n) for n in chars] for m in chars] == [[1, 1, 1], [1, 1, -1], [1, -1, 1]]


def test_pairing_genus_mismatch():
    with pytest.raises(GenusMismatch):
        pairing_e(C("0|0"), C("00|00"))


def test_action_identity_and_J():
    I = SymplecticF2.identity(2)
    J = swap_J(2)
    for m in characteristics(2):
        assert affine_action(I, m) == m
        assert epsilon(I, m) == 1
        assert affine_action(J, m) == Characteristic(2, m.b, m.a)
    for m in characteristics(1):
        assert epsilon(swap_J(1), m) == -1


@pytest.mark.parametrize("g", [1, 2, 3])
def test_translation_formulas(g):
    # every symmetric S: T_S{(a;b)} = (a; Sa + b + S_0) and eps = (-1)^{a'Sa}
    pairs = [(i, j) for i in range(g) for j in range(i, g)]
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        S = [[0] * g for _ in range(g)]
        for (i, j), v in zip(pairs, bits):
            S[i][j] = S[j][i] = v
        Sm = F2Matrix.from_lists(S)
        T = translation(Sm)
        for m in characteristics(g):
            expected_b = BitVec(g, (Sm @ m.a).bits ^ m.b.bits ^ Sm.diagonal().bits)
            assert affine_action(T, m) == Characteristic(g, m.a, expected_b)
            assert epsilon(T, m) == (-1) ** Sm.quad(m.a)


def test_f2_inverse():
    rng = np.random.default_rng(3)
    for _ in range(50):
        M = F2Matrix.from_lists(rng.integers(0, 2, size=(5, 5)).tolist())
        try:
            inv = M.inverse()
        except SingularMatrix:
            continue
        assert M @ inv == F2Matrix.identity(5)
    with pytest.raises(SingularMatrix):
        F2Matrix.zeros(3, 3).inverse()


def test_symplectic_validation():
    assert is_symplectic(form_J(2))
    with pytest.raises(ValueError):
        SymplecticF2.checked(1, F2Matrix.from_lists([[1, 1], [1, 1]]))


# property-based checks on random generator words

words = st.integers(min_value=0, max_value=2 ** 32 - 1)


def _element(g, seed):
    return random_element(g, np.random.default_rng(seed), length=25)


@settings(max_examples=60, deadline=None)
@given(g=st.integers(1, 4), s1=words, s2=words, mcode=st.integers(0, 255))
def test_action_law_and_cocycle(g, s1, s2, mcode):
    sigma, tau = _element(g, s1), _element(g, s2)
    m = Characteristic.from_code(g, mcode % (1 << (2 * g)))
    sm = affine_action(sigma, m)
    assert affine_action(tau @ sigma, m) == affine_action(tau, sm)
    assert epsilon(tau @ sigma, m) == epsilon(sigma, m) * epsilon(tau, sm)


@settings(max_examples=60, deadline=None)
@given(g=st.integers(1, 4), s=words, mc=st.integers(0, 255), nc=st.integers(0, 255))
def test_pairing_covariance_and_parity(g, s, mc, nc):
    sigma = _element(g, s)
    mask = (1 << (2 * g)) - 1
    m, n = Characteristic.from_code(g, mc & mask), Characteristic.from_code(g, nc & mask)
    sm, sn = affine_action(sigma, m), affine_action(sigma, n)
    assert parity(sm) is parity(m)
    assert pairing_e(sm, sn) == pairing_e(m, n) * epsilon(sigma, m) * epsilon(sigma, n)


@settings(max_examples=40, deadline=None)
@given(g=st.integers(1, 4), s=words)
def test_inverse_is_group_inverse(g, s):
    sigma = _element(g, s)
    assert (sigma @ sigma.inverse()).is_identity()
    assert is_symplectic(sigma.mat)

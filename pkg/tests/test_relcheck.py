from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetafay.chargeom import Characteristic, characteristics, count
from thetafay.relcheck import (
    FormalThetaSum,
    Inconclusive,
    distinguished_sums,
    equilibrate,
    exactness_bridge,
    genus1_images,
    genus1_nonvanishing,
    kernel_matches_vplus,
    numerical_rank,
    phi_display_check,
    phi_operator,
    rank_gradient_span,
    rank_theta_powers,
    translation_character_separation,
    translation_ratios,
    verify_vplus_relations,
    verify_wminus_relations,
    wplus_sum,
)
from thetafay.thetanum import SiegelPoint, sample_points

C = Characteristic.parse


def test_numerical_rank_synthetic():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(30, 4)) @ rng.normal(size=(4, 9))
    rep = numerical_rank(A)
    assert rep.rank == 4 and rep.conclusive
    assert numerical_rank(rng.normal(size=(12, 7))).rank == 7
    assert numerical_rank(np.zeros((3, 3))).rank == 0


def test_numerical_rank_inconclusive():
    rng = np.random.default_rng(2)
    Q1, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    Q2, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    # pivots straddle the threshold with only a 100x gap
    A = Q1 @ np.diag([1.0, 0.5, 1e-6, 1e-8, 1e-8, 1e-8]) @ Q2
    rep = numerical_rank(A)
    assert not rep.conclusive
    with pytest.raises(Inconclusive):
        numerical_rank(A, strict=True)


def test_equilibrate_preserves_rank():
    rng = np.random.default_rng(1)
    A = (rng.normal(size=(10, 3)) @ rng.normal(size=(3, 6))) * np.logspace(0, 8, 10)[:, None]
    B = equilibrate(A)
    assert np.abs(B).max() == pytest.approx(1.0)
    assert numerical_rank(A).rank == 3


@pytest.mark.parametrize("g,k,rank", [
    (1, 4, 2), (1, 8, 3), (2, 4, 5), (2, 2, 10), (2, 8, 10), (3, 4, 15)])
def test_theta_power_ranks(g, k, rank):
    rep = rank_theta_powers(g, k, seed=0)
    assert rep.rank == rank and rep.conclusive


def test_rank_stable_across_seeds_and_samples():
    kp = 10
    ranks = {rank_theta_powers(2, 4, n, seed=s).rank for s in (1, 2, 3) for n in (kp + 8, kp + 20)}
    assert ranks == {5}
    with pytest.raises(ValueError):
        rank_theta_powers(2, 4, 5)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_vplus_and_kernel(g):
    assert verify_vplus_relations(g, 5, seed=1) < 1e-10
    assert kernel_matches_vplus(g, seed=1)
    bridge = exactness_bridge(g, seed=1)
    assert bridge["max_vplus_residual"] < 1e-7
    assert bridge["min_wplus_residual"] > 1e-4


@pytest.mark.parametrize("g,rank", [(1, 1), (2, 5), (3, 21)])
def test_gradient_span(g, rank):
    rep = rank_gradient_span(g, seed=0)
    assert rep.rank == rank and rep.conclusive
    assert rep.shape[1] == count(g, "odd")


def test_wminus_relations():
    assert verify_wminus_relations(1) == 0
    assert verify_wminus_relations(2, 5, seed=3) < 1e-8
    assert verify_wminus_relations(3, 5, seed=3) < 1e-8


def test_phi_examples():
    s = FormalThetaSum.power_sum(2, 8, {C("00|00"): 1})
    assert phi_operator(s) == FormalThetaSum.power_sum(1, 8, {C("0|0"): 1})
    assert phi_operator(FormalThetaSum.power_sum(2, 8, {C("01|00"): 1})).is_zero()
    with pytest.raises(ValueError):
        phi_operator(s, 2)


@pytest.mark.parametrize("g", [2, 3, 4])
def test_phi_display(g):
    for k in (1, 4, 8, 12):
        assert phi_display_check(g, k)
    c = 2 ** (g - 1)
    _, literal = genus1_images(g, 8)
    assert literal.power_coeffs() == {C("0|0"): 3 * c, C("0|1"): c, C("1|0"): c}
    assert phi_operator(wplus_sum(g, 8), g - 1).power_coeffs() == {
        C("0|0"): 2 * c, C("0|1"): c, C("1|0"): c}


even2 = characteristics(2, "even")
coeff_maps = st.dictionaries(st.sampled_from(even2), st.integers(-5, 5), max_size=6)


@settings(max_examples=50, deadline=None)
@given(x=coeff_maps, y=coeff_maps, c=st.integers(-4, 4))
def test_phi_linear_and_multiplicative(x, y, c):
    s = FormalThetaSum.power_sum(2, 4, x)
    t = FormalThetaSum.power_sum(2, 4, y)
    assert phi_operator(s + t) == phi_operator(s) + phi_operator(t)
    assert phi_operator(s * Fraction(c)) == phi_operator(s) * Fraction(c)
    assert phi_operator(s * t) == phi_operator(s) * phi_operator(t)


def test_genus1_nonvanishing():
    tau = SiegelPoint.from_complex([[2j]])
    assert genus1_nonvanishing(8, [tau])["minus"] > 1e-3
    assert genus1_nonvanishing(4)["minus"] < 1e-12
    v = genus1_nonvanishing(12, nsamples=5)
    assert v["minus"] > 1e-6 and v["plus"] > 1e-6
    for k in (8, 12, 20):
        assert min(genus1_nonvanishing(k, seed=4).values()) > 1e-6


def test_distinguished_sum_shapes():
    minus, plus = distinguished_sums(2, 4)
    assert minus.power_coeffs()[C("00|00")] == 3
    assert plus.power_coeffs()[C("00|00")] == 5
    assert wplus_sum(2, 4).power_coeffs()[C("00|00")] == 3


def test_translation_phases():
    tau = sample_points(1, 1, 0)[0]
    r = translation_ratios(1, 2, tau)
    # generator index 1 is T_[1]; codes: (0;0) -> 0, (1;0) -> 1
    assert abs(r[(0, 1)] - 1) < 1e-12
    assert abs(r[(1, 1)] - (-1)) < 1e-12
    assert abs(r[(0, 1)] - r[(1, 1)]) == pytest.approx(2)
    assert abs(translation_ratios(1, 1, tau)[(1, 1)] - 1j) < 1e-12


def test_translation_separation():
    for g in (1, 2):
        for k in (1, 2, 3, 5):
            assert translation_character_separation(g, k)
    assert not translation_character_separation(1, 8)
    with pytest.raises(ValueError):
        translation_character_separation(3, 1)

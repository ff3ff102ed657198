"""Numerical certificates for the dimension and relation theorems.

Exact eigenspaces from ``fayops`` are paired with sampled theta data; ranks
are accepted only when the pivot profile has a clean gap.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg

from .chargeom import BitVec, Characteristic, Parity, characteristics, count, parity
from .fayops import build_fay, exact_eigenspaces
from .symgroup import generators
from .thetanum import (
    DEFAULT_TOL,
    SiegelPoint,
    sample_points,
    sym4,
    sym4_index,
    theta_gradients,
    theta_nullwerte,
)

RANK_TOL = 1e-7
MIN_GAP = 1e3
MAX_NUMERIC_GENUS = 3


class Inconclusive(RuntimeError):
    """The pivot profile has no clean gap at the requested tolerance."""


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("THETA_FAY_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn: Callable, items: Sequence) -> list:
    n = thread_cap()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# numerical rank


@dataclass(frozen=True)
class RankReport:
    shape: tuple[int, int]
    tol: float
    pivots: tuple[float, ...]
    rank: int
    gap_ratio: float
    seed: int | None = None

    @property
    def conclusive(self) -> bool:
        return self.gap_ratio >= MIN_GAP

    def as_dict(self) -> dict:
        return {
            "shape": list(self.shape),
            "tol": self.tol,
            "rank": self.rank,
            "gap_ratio": self.gap_ratio if np.isfinite(self.gap_ratio) else "inf",
            "conclusive": self.conclusive,
            "smallest_accepted_pivot": self.pivots[self.rank - 1] if self.rank else None,
            "largest_rejected_pivot": self.pivots[self.rank] if self.rank < len(self.pivots) else None,
            "seed": self.seed,
        }


def equilibrate(A: np.ndarray) -> np.ndarray:
    """Scale every row, then every column, to unit max modulus (rank-preserving)."""
    A = np.asarray(A, dtype=complex)
    rmax = np.abs(A).max(axis=1, keepdims=True)
    A = A / np.where(rmax > 0, rmax, 1)
    cmax = np.abs(A).max(axis=0, keepdims=True)
    return A / np.where(cmax > 0, cmax, 1)


def numerical_rank(A: np.ndarray, tol: float = RANK_TOL, seed: int | None = None,
                   strict: bool = False) -> RankReport:
    """Rank from column-pivoted QR: pivots above tol * largest pivot count.

    gap_ratio = smallest accepted pivot / largest rejected pivot.  With
    ``strict`` an inconclusive gap raises ``Inconclusive``.
    """
    B = equilibrate(A)
    R = scipy.linalg.qr(B, mode="r", pivoting=True)[0]
    piv = np.abs(np.diag(R))
    n = piv.shape[0]
    if n == 0 or piv[0] == 0:
        report = RankReport(B.shape, tol, tuple(piv.tolist()), 0, float("inf"), seed)
    else:
        rank = int(np.sum(piv > tol * piv[0]))
        if rank == n:
            gap = float("inf")
        else:
            rejected = piv[rank]
            gap = float(piv[rank - 1] / rejected) if rejected > 0 else float("inf")
        report = RankReport(B.shape, tol, tuple(float(p) for p in piv), rank, gap, seed)
    if strict and not report.conclusive:
        raise Inconclusive(f"gap ratio {report.gap_ratio:.3g} < {MIN_GAP:g}")
    return report


# ---------------------------------------------------------------------------
# theta data


def _check_genus(g: int) -> None:
    if not 1 <= g <= MAX_NUMERIC_GENUS:
        raise ValueError(f"numerical checks support 1 <= g <= {MAX_NUMERIC_GENUS}")


def even_nullwerte(g: int, nsamples: int, seed: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """(nsamples, k_g^+) array of theta nullwerte at seeded points."""
    pts = sample_points(g, nsamples, seed)
    return np.array(_map(lambda t: theta_nullwerte(t, Parity.EVEN, tol), pts))


def sym4_tensors(g: int, nsamples: int, seed: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """(nsamples, k_g^-, C(g+3, 4)) array of Sym^4 gradient tensors."""
    pts = sample_points(g, nsamples, seed)

    def one(tau: SiegelPoint) -> np.ndarray:
        return np.array([sym4(v).coeffs for v in theta_gradients(tau, tol)])

    return np.array(_map(one, pts))


def _relation_residual(data: np.ndarray, v: Sequence[int]) -> float:
    """max over samples of |sum_m v_m data_m| / (||v||_1 max_m |data_m|)."""
    v = np.asarray(v, dtype=float)
    scale = np.abs(v).sum() * np.abs(data).max(axis=1)
    return float(np.max(np.abs(data @ v) / scale))


def _exact_basis(g: int, sector: Parity, which: str) -> list[tuple[int, ...]]:
    V, W = exact_eigenspaces(build_fay(g, sector))
    return list((V if which == "V" else W).vectors)


def verify_vplus_relations(g: int, nsamples: int = 10, seed: int = 0,
                           tol: float = DEFAULT_TOL) -> float:
    """Max normalized residual of sum_m v_m theta[m]^4 over V+ basis vectors."""
    _check_genus(g)
    data = even_nullwerte(g, nsamples, seed, tol) ** 4
    return max(_relation_residual(data, v) for v in _exact_basis(g, Parity.EVEN, "V"))


def rank_theta_powers(g: int, k: int, nsamples: int | None = None, tol: float = RANK_TOL,
                      seed: int = 0) -> RankReport:
    """Numerical rank of the (nsamples, k_g^+) matrix [theta[m]^k(tau_j)]."""
    _check_genus(g)
    kp = count(g, Parity.EVEN)
    nsamples = nsamples if nsamples is not None else kp + 8
    if nsamples < kp + 8:
        raise ValueError(f"need at least {kp + 8} samples for g={g}")
    data = even_nullwerte(g, nsamples, seed) ** k
    return numerical_rank(data, tol, seed)


def kernel_matches_vplus(g: int, nsamples: int | None = None, tol: float = RANK_TOL,
                         seed: int = 0) -> bool:
    """Every exact V+ vector kills the k=4 sample matrix and rank + dim V+ = k_g^+."""
    _check_genus(g)
    kp = count(g, Parity.EVEN)
    nsamples = nsamples if nsamples is not None else kp + 8
    report = rank_theta_powers(g, 4, nsamples, tol, seed)
    if not report.conclusive:
        raise Inconclusive(f"gap ratio {report.gap_ratio:.3g}")
    data = even_nullwerte(g, nsamples, seed) ** 4
    V = _exact_basis(g, Parity.EVEN, "V")
    annihilated = all(_relation_residual(data, v) < tol for v in V)
    return annihilated and report.rank + len(V) == kp


def exactness_bridge(g: int, nsamples: int | None = None, tol: float = RANK_TOL,
                     seed: int = 0) -> dict:
    """Residuals of V+ and W+ basis vectors against the k=4 sample matrix."""
    _check_genus(g)
    kp = count(g, Parity.EVEN)
    data = even_nullwerte(g, nsamples or kp + 8, seed) ** 4
    v_res = [_relation_residual(data, v) for v in _exact_basis(g, Parity.EVEN, "V")]
    w_res = [_relation_residual(data, w) for w in _exact_basis(g, Parity.EVEN, "W")]
    return {
        "max_vplus_residual": max(v_res),
        "min_wplus_residual": min(w_res),
        "ok": max(v_res) < tol and min(w_res) >= 1e3 * tol,
    }


def _gradient_matrix(g: int, nsamples: int, seed: int) -> np.ndarray:
    T = sym4_tensors(g, nsamples, seed)  # (samples, odd m, index)
    return T.transpose(0, 2, 1).reshape(-1, T.shape[1])


def rank_gradient_span(g: int, nsamples: int | None = None, tol: float = RANK_TOL,
                       seed: int = 0) -> RankReport:
    """Rank of the matrix with one column per odd m, stacking Sym^4 J(theta[m])."""
    _check_genus(g)
    km = count(g, Parity.ODD)
    per = len(sym4_index(g))
    need = -(-km // per)
    nsamples = nsamples if nsamples is not None else need + 8
    if nsamples * per < km:
        raise ValueError("too few samples for the number of odd characteristics")
    return numerical_rank(_gradient_matrix(g, nsamples, seed), tol, seed)


def verify_wminus_relations(g: int, nsamples: int = 5, seed: int = 0) -> float:
    """Max normalized residual of sum_m w_m S(theta[m]) over W- basis vectors."""
    _check_genus(g)
    W = _exact_basis(g, Parity.ODD, "W")
    if not W:
        return 0.0
    T = sym4_tensors(g, nsamples, seed)
    worst = 0.0
    for w in W:
        wv = np.asarray(w, dtype=float)
        combo = np.einsum("m,smi->si", wv, T)
        scale = np.abs(wv).sum() * np.abs(T).max(axis=(1, 2))
        worst = max(worst, float(np.max(np.abs(combo).max(axis=1) / scale)))
    return worst


# ---------------------------------------------------------------------------
# formal theta sums and the Siegel Phi operator

Monomial = tuple[tuple[Characteristic, int], ...]


def _monomial(factors: Iterable[tuple[Characteristic, int]]) -> Monomial:
    acc: dict[Characteristic, int] = {}
    for m, e in factors:
        acc[m] = acc.get(m, 0) + e
    return tuple(sorted(((m, e) for m, e in acc.items() if e), key=lambda t: t[0].sort_key))


@dataclass(frozen=True)
class FormalThetaSum:
    """Finite sum of coefficients times monomials in theta[m], all of degree k.

    The common case is a power sum sum_m c_m theta[m]^k (see ``power_sum``).
    """

    g: int
    k: int
    terms: Mapping[Monomial, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("degree must be >= 1")
        clean = {}
        for mono, c in self.terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            if sum(e for _, e in mono) != self.k or any(m.g != self.g for m, _ in mono):
                raise ValueError("monomial does not match the sum's genus/degree")
            clean[mono] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def power_sum(cls, g: int, k: int, coeffs: Mapping[Characteristic, object]) -> "FormalThetaSum":
        return cls(g, k, {((m, k),): Fraction(c) for m, c in coeffs.items()})

    def power_coeffs(self) -> dict[Characteristic, Fraction]:
        """Coefficients by characteristic, for sums of pure k-th powers."""
        out = {}
        for mono, c in self.terms.items():
            if len(mono) != 1:
                raise ValueError("not a pure power sum")
            out[mono[0][0]] = c
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FormalThetaSum") -> "FormalThetaSum":
        if (self.g, self.k) != (other.g, other.k):
            raise ValueError("can only add sums of equal genus and degree")
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, 0) + c
        return FormalThetaSum(self.g, self.k, terms)

    def __rmul__(self, scalar) -> "FormalThetaSum":
        s = Fraction(scalar)
        return FormalThetaSum(self.g, self.k, {m: s * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, FormalThetaSum):
            return self.__rmul__(other)
        if self.g != other.g:
            raise ValueError("genus mismatch")
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _monomial(m1 + m2)
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return FormalThetaSum(self.g, self.k + other.k, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.terms.items():
            body = "*".join(f"th[{m}]^{e}" for m, e in mono)
            parts.append(f"{c}*{body}")
        return " + ".join(parts)


def _drop_last(m: Characteristic) -> Characteristic | None:
    g = m.g
    if m.a[g - 1]:
        return None
    mask = (1 << (g - 1)) - 1
    return Characteristic(g - 1, BitVec(g - 1, m.a.bits & mask), BitVec(g - 1, m.b.bits & mask))


def phi_operator(s: FormalThetaSum, times: int = 1) -> FormalThetaSum:
    """Apply the Siegel Phi operator ``times`` times to a formal theta sum.

    theta[(a, a_g; b, b_g)] goes to theta[(a; b)] if a_g = 0 and to 0 if
    a_g = 1; a monomial dies as soon as one of its factors does.
    """
    if times < 0:
        raise ValueError("times must be >= 0")
    if times >= s.g:
        raise ValueError(f"cannot apply Phi {times} times in genus {s.g}")
    for _ in range(times):
        terms: dict[Monomial, Fraction] = {}
        for mono, c in s.terms.items():
            factors = [(_drop_last(m), e) for m, e in mono]
            if any(m is None for m, _ in factors):
                continue
            new = _monomial(factors)
            terms[new] = terms.get(new, 0) + c
        s = FormalThetaSum(s.g - 1, s.k, terms)
    return s


def distinguished_sums(g: int, k: int) -> tuple[FormalThetaSum, FormalThetaSum]:
    """(2^g - 1) th[0]^k - sum_{m != 0} th[m]^k and (2^g + 1) th[0]^k + sum_{m != 0} th[m]^k."""
    even = characteristics(g, Parity.EVEN)
    minus = {m: (2 ** g - 1 if m.is_zero() else -1) for m in even}
    plus = {m: (2 ** g + 1 if m.is_zero() else 1) for m in even}
    return FormalThetaSum.power_sum(g, k, minus), FormalThetaSum.power_sum(g, k, plus)


def wplus_sum(g: int, k: int) -> FormalThetaSum:
    """(2^{g-1} + 1) th[0]^k + sum_{m != 0} th[m]^k, the sum attached to W+."""
    even = characteristics(g, Parity.EVEN)
    coeffs = {m: (2 ** (g - 1) + 1 if m.is_zero() else 1) for m in even}
    return FormalThetaSum.power_sum(g, k, coeffs)


def genus1_images(g: int, k: int) -> tuple[FormalThetaSum, FormalThetaSum]:
    """Phi^{g-1} of both distinguished sums."""
    minus, plus = distinguished_sums(g, k)
    return phi_operator(minus, g - 1), phi_operator(plus, g - 1)


def phi_display_check(g: int, k: int) -> bool:
    """Phi^{g-1} of the V+ sum equals 2^{g-1}(th00^k - th01^k - th10^k)."""
    image, _ = genus1_images(g, k)
    c = 2 ** (g - 1)
    expected = FormalThetaSum.power_sum(1, k, {
        Characteristic.parse("0|0"): c,
        Characteristic.parse("0|1"): -c,
        Characteristic.parse("1|0"): -c,
    })
    return image == expected


def evaluate_sum(s: FormalThetaSum, tau: SiegelPoint, tol: float = DEFAULT_TOL) -> complex:
    """Numerical value of a formal sum at tau (even characteristics only)."""
    vals = dict(zip(characteristics(s.g, Parity.EVEN), theta_nullwerte(tau, Parity.EVEN, tol)))
    total = 0j
    for mono, c in s.terms.items():
        term = complex(c)
        for m, e in mono:
            if parity(m) is Parity.ODD:
                term = 0j
                break
            term *= vals[m] ** e
        total += term
    return total


def genus1_nonvanishing(k: int, samples: Sequence[SiegelPoint] | None = None,
                        seed: int = 0, nsamples: int = 5) -> dict[str, float]:
    """Minimum moduli of the genus-1 images of the distinguished sums.

    "minus": th00^k - th01^k - th10^k (the V+ image, Jacobi residual at k=4).
    "plus": 2 th00^k + th01^k + th10^k (the W+ image from ``wplus_sum``).
    "plus_literal": 3 th00^k + th01^k + th10^k, the image of the second sum
    of ``distinguished_sums``.  Each image is 2^{g-1} times these, for every g.
    """
    samples = list(samples) if samples is not None else sample_points(1, nsamples, seed)
    # in genus 1 the sums are already the Phi images
    minus, literal = distinguished_sums(1, k)
    plus = wplus_sum(1, k)
    return {
        "minus": float(min(abs(evaluate_sum(minus, t)) for t in samples)),
        "plus": float(min(abs(evaluate_sum(plus, t)) for t in samples)),
        "plus_literal": float(min(abs(evaluate_sum(literal, t)) for t in samples)),
    }


def translation_ratios(g: int, k: int, tau: SiegelPoint) -> dict[tuple[int, int], complex]:
    """theta[m]^k(tau + 2S) / theta[m]^k(tau) keyed by (char code, generator index)."""
    before = dict(zip(characteristics(g, Parity.EVEN), theta_nullwerte(tau, Parity.EVEN)))
    out = {}
    for idx, (tag, S) in enumerate(generators(g).tags):
        if tag != "T":
            continue
        shifted = SiegelPoint(g, tau.re + 2 * np.asarray(S, dtype=float), tau.im)
        after = dict(zip(characteristics(g, Parity.EVEN), theta_nullwerte(shifted, Parity.EVEN)))
        for m in before:
            out[(m.code, idx)] = (after[m] / before[m]) ** k
    return out


def translation_character_separation(g: int, k: int, seed: int = 0,
                                     threshold: float = 0.5) -> bool:
    """For m = 0 and every n = (a; 0), a != 0, some generator translation
    T_S gives theta-power ratios differing by more than ``threshold``.

    Only claimed for 4 not dividing k; for 4 | k all ratios are 1.
    """
    if not 1 <= g <= 2:
        raise ValueError("translation_character_separation supports g <= 2")
    tau = sample_points(g, 1, seed)[0]
    ratios = translation_ratios(g, k, tau)
    tidx = [i for i, (tag, _) in enumerate(generators(g).tags) if tag == "T"]
    zero = Characteristic.zero(g)
    for a in range(1, 1 << g):
        n = Characteristic(g, BitVec(g, a), BitVec(g, 0))
        if not any(abs(ratios[(zero.code, i)] - ratios[(n.code, i)]) > threshold for i in tidx):
            return False
    return True

"""Theta nullwerte, their z-gradients, and the modular action on H_g.

Series are summed over the box ||p + a/2||_inf <= R.  The reported
``trunc_bound`` is a rigorous bound on the discarded tail, obtained from
Im(tau)[x] >= lam_min |x|^2 and a union bound over the coordinate that
leaves the box (see ``truncation_bound``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .chargeom import (
    BitVec,
    Characteristic,
    F2Matrix,
    Parity,
    SymplecticF2,
    characteristics,
    epsilon,
    parity,
)
from .symgroup import generators

DEFAULT_TOL = 1e-13
MIN_EIG_GUARD = 0.3
MAX_RADIUS = 40


class IllConditioned(ValueError):
    pass


class NotInSiegelSpace(ValueError):
    pass


@dataclass(frozen=True)
class SiegelPoint:
    g: int
    re: np.ndarray = field(repr=False)
    im: np.ndarray = field(repr=False)

    def __post_init__(self):
        re = np.asarray(self.re, dtype=float).reshape(self.g, self.g)
        im = np.asarray(self.im, dtype=float).reshape(self.g, self.g)
        scale = max(1.0, float(np.abs(re).max()), float(np.abs(im).max()))
        if np.abs(re - re.T).max() > 1e-12 * scale or np.abs(im - im.T).max() > 1e-12 * scale:
            raise NotInSiegelSpace("tau is not symmetric")
        try:
            np.linalg.cholesky(im)
        except np.linalg.LinAlgError:
            raise NotInSiegelSpace("Im(tau) is not positive definite") from None
        object.__setattr__(self, "re", (re + re.T) / 2)
        object.__setattr__(self, "im", (im + im.T) / 2)

    @classmethod
    def from_complex(cls, tau) -> "SiegelPoint":
        tau = np.atleast_2d(np.asarray(tau, dtype=complex))
        return cls(tau.shape[0], tau.real, tau.imag)

    @property
    def tau(self) -> np.ndarray:
        return self.re + 1j * self.im

    @property
    def min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.im)[0])


def sample_siegel(g: int, rng: np.random.Generator) -> SiegelPoint:
    """Im = I + Q'Q/4 and Re symmetric, all entries of Q, Re uniform in [-1/2, 1/2]."""
    Q = rng.uniform(-0.5, 0.5, size=(g, g))
    im = np.eye(g) + 0.25 * Q.T @ Q
    X = rng.uniform(-0.5, 0.5, size=(g, g))
    re = np.triu(X) + np.triu(X, 1).T
    return SiegelPoint(g, re, im)


def sample_points(g: int, n: int, seed: int) -> list[SiegelPoint]:
    rng = np.random.default_rng(seed)
    return [sample_siegel(g, rng) for _ in range(n)]


@dataclass(frozen=True)
class ThetaEval:
    value: complex
    trunc_bound: float
    radius: int


@dataclass(frozen=True)
class GradientEval:
    vector: np.ndarray
    trunc_bound: float
    radius: int


@dataclass(frozen=True)
class Sym4Tensor:
    g: int
    coeffs: np.ndarray

    @property
    def index(self) -> list[tuple[int, ...]]:
        return sym4_index(self.g)


# ---------------------------------------------------------------------------
# truncation


def _full_sum(lam: float, half: bool) -> float:
    """Upper bound for sum_{x in Z + c} exp(-pi lam x^2), c in {0, 1/2}."""
    q = math.exp(-math.pi * lam)
    if half:
        return 2 * math.exp(-math.pi * lam / 4) / (1 - q)
    return 1 + 2 * q / (1 - q)


def _tail(lam: float, r0: float) -> float:
    """Upper bound for sum_{|x| >= r0, x in r0 + Z} exp(-pi lam x^2)."""
    q = math.exp(-2 * math.pi * lam * r0)
    return 2 * math.exp(-math.pi * lam * r0 * r0) / (1 - q)


def _tail_abs(lam: float, r0: float) -> float:
    """Upper bound for sum_{|x| >= r0} |x| exp(-pi lam x^2)."""
    q = math.exp(-2 * math.pi * lam * r0)
    return 2 * math.exp(-math.pi * lam * r0 * r0) * (r0 / (1 - q) + q / (1 - q) ** 2)


def _first_excluded(R: int, half: bool) -> float:
    return R + 0.5 if half else R + 1.0


def truncation_bound(a_bits: Sequence[int], lam: float, R: int, gradient: bool = False) -> float:
    """Bound on the tail of the theta series (or of each gradient component).

    Any dropped x has some |x_i| > R; bound by summing, over i, the 1-d tail
    in coordinate i times full 1-d sums in the other coordinates.
    """
    halves = [bool(x) for x in a_bits]
    g = len(halves)
    full = [_full_sum(lam, h) for h in halves]
    tails = [_tail(lam, _first_excluded(R, h)) for h in halves]
    if not gradient:
        return sum(tails[i] * math.prod(full[:i] + full[i + 1:]) for i in range(g))
    # |d/dz_j term| = 2 pi |x_j| |term|; bound the worst component j
    abs_full = [_tail_abs(lam, 0.5 if h else 1.0) for h in halves]
    abs_tail = [_tail_abs(lam, _first_excluded(R, h)) for h in halves]
    worst = 0.0
    for j in range(g):
        total = 0.0
        for i in range(g):
            fac = [full[k] for k in range(g)]
            if i == j:
                fac[i] = abs_tail[i]
            else:
                fac[i] = tails[i]
                fac[j] = abs_full[j]
            total += math.prod(fac)
        worst = max(worst, total)
    return 2 * math.pi * worst


def choose_radius(a_bits: Sequence[int], lam: float, tol: float, gradient: bool = False) -> int:
    for R in range(1, MAX_RADIUS + 1):
        if truncation_bound(a_bits, lam, R, gradient) <= tol:
            return R
    raise IllConditioned(f"tolerance {tol:g} needs radius > {MAX_RADIUS} (lam_min={lam:.3g})")


@lru_cache(maxsize=64)
def _box(g: int, R: int) -> np.ndarray:
    r = np.arange(-R - 1, R + 1, dtype=float)
    return np.array(list(itertools.product(r, repeat=g)), dtype=float)


def _lattice(a_bits: Sequence[int], R: int) -> np.ndarray:
    """All x = p + a/2 with ||x||_inf <= R."""
    g = len(a_bits)
    x = _box(g, R) + np.asarray(a_bits, dtype=float) / 2
    return x[np.all(np.abs(x) <= R + 1e-9, axis=1)]


def _terms(x: np.ndarray, tau: np.ndarray, b_bits: Sequence[int], z=None) -> np.ndarray:
    quad = np.einsum("ni,ij,nj->n", x, tau, x)
    phase = x @ np.asarray(b_bits, dtype=float) / 2
    expo = 1j * math.pi * quad + 2j * math.pi * phase
    if z is not None:
        expo = expo + 2j * math.pi * (x @ np.asarray(z, dtype=complex))
    return np.exp(expo)


_COS = np.array([1.0, 0.0, -1.0, 0.0])
_SIN = np.array([0.0, 1.0, 0.0, -1.0])


def _quarter_turns(x: np.ndarray, b_bits: Sequence[int]) -> np.ndarray:
    """2 x'b mod 4, i.e. exp(pi i x'b) = i^result, computed exactly."""
    return np.rint(2 * (x @ np.asarray(b_bits, dtype=float))).astype(np.int64) % 4


def _check_point(tau: SiegelPoint, min_eig: float) -> float:
    lam = tau.min_eig
    if lam < min_eig:
        raise IllConditioned(f"lam_min(Im tau) = {lam:.3g} below the guard {min_eig}")
    return lam


def _bits(m: Characteristic) -> tuple[list[int], list[int]]:
    return m.a.to_list(), m.b.to_list()


def theta_nullwert(m: Characteristic, tau: SiegelPoint, tol: float = DEFAULT_TOL,
                   min_eig: float = MIN_EIG_GUARD, radius: int | None = None) -> ThetaEval:
    """theta[m](tau, 0) for the 0/1 lift of m."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if m.g != tau.g:
        raise ValueError("genus mismatch")
    lam = _check_point(tau, min_eig)
    a, b = _bits(m)
    R = radius if radius is not None else choose_radius(a, lam, tol)
    x = _lattice(a, R)
    # the box is symmetric under x -> -x, so only cos(pi x'b) survives
    base = np.exp(1j * math.pi * np.einsum("ni,ij,nj->n", x, tau.tau, x))
    value = complex((base * _COS[_quarter_turns(x, b)]).sum())
    return ThetaEval(value, truncation_bound(a, lam, R), R)


def theta_nullwerte(tau: SiegelPoint, sector: "Parity | str" = Parity.EVEN,
                    tol: float = DEFAULT_TOL, min_eig: float = MIN_EIG_GUARD) -> np.ndarray:
    """Values for all characteristics of one parity, in canonical order.

    Terms are shared between characteristics with the same top half a.
    """
    lam = _check_point(tau, min_eig)
    chars = characteristics(tau.g, sector)
    out = np.empty(len(chars), dtype=complex)
    cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for k, m in enumerate(chars):
        a, b = _bits(m)
        if m.a.bits not in cache:
            R = choose_radius(a, lam, tol)
            x = _lattice(a, R)
            cache[m.a.bits] = (x, np.exp(1j * math.pi * np.einsum("ni,ij,nj->n", x, tau.tau, x)))
        x, base = cache[m.a.bits]
        out[k] = (base * _COS[_quarter_turns(x, b)]).sum()
    return out


def theta_gradient(m: Characteristic, tau: SiegelPoint, tol: float = DEFAULT_TOL,
                   min_eig: float = MIN_EIG_GUARD, radius: int | None = None) -> GradientEval:
    """grad_z theta[m](tau, z) at z = 0; only meaningful for odd m."""
    if parity(m) is not Parity.ODD:
        raise ValueError("the z-gradient at 0 vanishes identically for even characteristics")
    if m.g != tau.g:
        raise ValueError("genus mismatch")
    lam = _check_point(tau, min_eig)
    a, b = _bits(m)
    R = radius if radius is not None else choose_radius(a, lam, tol, gradient=True)
    x = _lattice(a, R)
    # odd in x, so 2 pi i x_j E(x) exp(pi i x'b) pairs to -2 pi x_j E(x) sin(pi x'b)
    base = np.exp(1j * math.pi * np.einsum("ni,ij,nj->n", x, tau.tau, x))
    t = base * _SIN[_quarter_turns(x, b)]
    vec = -2 * math.pi * (x * t[:, None]).sum(axis=0)
    return GradientEval(vec, truncation_bound(a, lam, R, gradient=True), R)


def theta_gradients(tau: SiegelPoint, tol: float = DEFAULT_TOL,
                    min_eig: float = MIN_EIG_GUARD) -> np.ndarray:
    """(k_g^-, g) array of gradients for all odd characteristics."""
    return np.array([theta_gradient(m, tau, tol, min_eig).vector
                     for m in characteristics(tau.g, Parity.ODD)])


def _theta_z(m: Characteristic, tau: SiegelPoint, z: Sequence[complex], radius: int) -> complex:
    """theta[m](tau, z) at a fixed radius; internal, for derivative checks."""
    a, b = _bits(m)
    return complex(_terms(_lattice(a, radius), tau.tau, b, z).sum())


# ---------------------------------------------------------------------------
# symmetric tensors


@lru_cache(maxsize=None)
def sym4_index(g: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(g), 4))


def sym4(v: Sequence[complex]) -> Sym4Tensor:
    """Plain monomial coefficients v_i v_j v_k v_l on multisets i <= j <= k <= l."""
    v = np.asarray(v, dtype=complex)
    g = v.shape[0]
    coeffs = np.array([v[i] * v[j] * v[k] * v[l] for i, j, k, l in sym4_index(g)])
    return Sym4Tensor(g, coeffs)


# ---------------------------------------------------------------------------
# integral symplectic matrices and the modular action


@dataclass(frozen=True)
class IntegerSymplectic:
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = np.asarray(self.mat, dtype=np.int64)
        n = M.shape[0]
        if M.shape != (n, n) or n % 2:
            raise ValueError("expected a 2g x 2g integer matrix")
        J = _std_J(n // 2)
        if not np.array_equal(M.T @ J @ M, J):
            raise ValueError("matrix is not symplectic over Z")
        object.__setattr__(self, "mat", M)

    @property
    def g(self) -> int:
        return self.mat.shape[0] // 2

    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        g = self.g
        M = self.mat
        return M[:g, :g], M[:g, g:], M[g:, :g], M[g:, g:]

    def mod2(self) -> SymplecticF2:
        return SymplecticF2.checked(self.g, F2Matrix.from_lists((self.mat % 2).tolist()))

    def __matmul__(self, other: "IntegerSymplectic") -> "IntegerSymplectic":
        return IntegerSymplectic(self.mat @ other.mat)

    def action(self, m: Sequence[int]) -> np.ndarray:
        """sigma{m} = sigma'^{-1} m + ((CD')_0; (AB')_0) over Z."""
        A, B, C, D = self.blocks()
        J = _std_J(self.g)
        inv_t = J @ self.mat @ J.T  # sigma'^{-1} for symplectic sigma
        shift = np.concatenate([np.diag(C @ D.T), np.diag(A @ B.T)])
        return inv_t @ np.asarray(m, dtype=np.int64) + shift


def _std_J(g: int) -> np.ndarray:
    I = np.eye(g, dtype=np.int64)
    Z = np.zeros((g, g), dtype=np.int64)
    return np.block([[Z, I], [-I, Z]])


def j_lift(g: int) -> IntegerSymplectic:
    """(0, -I; I, 0)."""
    return IntegerSymplectic(_std_J(g).T)


def translation_lift(S: Sequence[Sequence[int]]) -> IntegerSymplectic:
    S = np.asarray(S, dtype=np.int64)
    g = S.shape[0]
    I = np.eye(g, dtype=np.int64)
    return IntegerSymplectic(np.block([[I, S], [np.zeros_like(S), I]]))


def integer_generators(g: int) -> list[IntegerSymplectic]:
    """Integral lifts of ``generators(g)``, in the same order."""
    out = []
    for tag, S in generators(g).tags:
        out.append(j_lift(g) if tag == "J" else translation_lift(S))
    return out


def modular_apply(sigma: IntegerSymplectic, tau: SiegelPoint) -> SiegelPoint:
    """(A tau + B)(C tau + D)^{-1}."""
    A, B, C, D = sigma.blocks()
    t = tau.tau
    num = A @ t + B
    den = C @ t + D
    # X = num den^{-1}  <=>  X' = den'^{-1} num'
    X = np.linalg.solve(den.T, num.T).T
    scale = max(1.0, float(np.abs(X).max()))
    if np.abs(X - X.T).max() > 1e-10 * scale:
        raise NotInSiegelSpace("image of tau is not symmetric; numerical breakdown")
    return SiegelPoint.from_complex((X + X.T) / 2)


def automorphy_det(sigma: IntegerSymplectic, tau: SiegelPoint) -> complex:
    _, _, C, D = sigma.blocks()
    return complex(np.linalg.det(C @ tau.tau + D))


def char_from_int(v: Sequence[int]) -> Characteristic:
    v = [int(x) % 2 for x in v]
    g = len(v) // 2
    return Characteristic(g, BitVec.from_list(v[:g]), BitVec.from_list(v[g:]))


def char_to_int(m: Characteristic) -> np.ndarray:
    return np.array(m.a.to_list() + m.b.to_list(), dtype=np.int64)


def check_transformation_4th(sigma: IntegerSymplectic, m: Characteristic, tau: SiegelPoint,
                             tol: float = DEFAULT_TOL, min_eig: float = 0.05) -> float:
    """Relative residual of theta[sigma{m}]^4(sigma tau) = eps_m(sigma) det(C tau + D)^2 theta[m]^4(tau)."""
    image = char_from_int(sigma.action(char_to_int(m)))
    t2 = modular_apply(sigma, tau)
    lhs = theta_nullwert(image, t2, tol, min_eig=min_eig).value ** 4
    th4 = theta_nullwert(m, tau, tol, min_eig=min_eig).value ** 4
    det = automorphy_det(sigma, tau)
    rhs = epsilon(sigma.mod2(), m) * det ** 2 * th4
    return abs(lhs - rhs) / max(1.0, abs(th4) * abs(det) ** 2)

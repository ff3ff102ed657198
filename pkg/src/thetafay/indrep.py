"""Induced representations of Sp(g, F2) as signed permutations of characteristics.

sigma acts on the span of the e_m (m of one parity) by
sigma(e_m) = eps_m(sigma) e_{sigma{m}}.  With the even sector this realizes
Ind_H^G(eps_H), H the stabilizer of 0; with the odd sector it realizes
Ind_K^G(eps_K), K the stabilizer of ``odd_base(g)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact
from .chargeom import (
    Characteristic,
    Parity,
    SymplecticF2,
    affine_action,
    char_index,
    characteristics,
    epsilon,
    odd_base,
    parity,
)
from .symgroup import (
    GroupEnumeration,
    batch_action,
    batch_epsilon_exponent,
    enumerate_group,
    random_stabilizer_element,
    transporter,
)


@dataclass(frozen=True)
class SignedPermMatrix:
    """Column i carries signs[i] in row perm[i]."""

    g: int
    sector: Parity
    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm is not a bijection")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +-1")

    def __matmul__(self, other: "SignedPermMatrix") -> "SignedPermMatrix":
        if (self.g, self.sector) != (other.g, other.sector):
            raise ValueError("incompatible representations")
        perm = tuple(self.perm[j] for j in other.perm)
        signs = tuple(s * self.signs[j] for s, j in zip(other.signs, other.perm))
        return SignedPermMatrix(self.g, self.sector, perm, signs)

    def to_numpy(self) -> np.ndarray:
        k = len(self.perm)
        P = np.zeros((k, k), dtype=np.int64)
        P[list(self.perm), list(range(k))] = self.signs
        return P

    def apply(self, v: Sequence) -> list:
        out = [0] * len(v)
        for i, x in enumerate(v):
            out[self.perm[i]] = self.signs[i] * x
        return out

    def trace(self) -> int:
        return sum(s for i, (p, s) in enumerate(zip(self.perm, self.signs)) if p == i)


def sector_base(g: int, sector: "Parity | str") -> Characteristic:
    return Characteristic.zero(g) if Parity.parse(sector) is Parity.EVEN else odd_base(g)


def rep_matrix(sigma: SymplecticF2, sector: "Parity | str") -> SignedPermMatrix:
    sector = Parity.parse(sector)
    chars = characteristics(sigma.g, sector)
    index = char_index(sigma.g, sector)
    perm = tuple(index[affine_action(sigma, m)] for m in chars)
    signs = tuple(epsilon(sigma, m) for m in chars)
    return SignedPermMatrix(sigma.g, sector, perm, signs)


def character(sigma: SymplecticF2, sector: "Parity | str", signed: bool = True) -> int:
    """sum over fixed m of eps_m(sigma) (signed) or the fixed-point count."""
    total = 0
    for m in characteristics(sigma.g, sector):
        if affine_action(sigma, m) == m:
            total += epsilon(sigma, m) if signed else 1
    return total


def character_values(rows: np.ndarray, g: int, sector: "Parity | str",
                     signed: bool = True) -> np.ndarray:
    """Character of every element of a packed batch."""
    chi = np.zeros(rows.shape[0], dtype=np.int64)
    for m in characteristics(g, sector):
        fixed = batch_action(rows, g, m.code) == m.code
        if signed:
            sign = 1 - 2 * batch_epsilon_exponent(rows, g, m.code).astype(np.int64)
            chi += np.where(fixed, sign, 0)
        else:
            chi += fixed
    return chi


def character_norm(g: int, sector: "Parity | str", signed: bool = True,
                   enum: GroupEnumeration | None = None) -> Fraction:
    """<chi, chi> = |G|^{-1} sum chi(sigma)^2, streamed over the enumeration."""
    enum = enum or enumerate_group(g)
    total = 0
    for rows in enum.chunks():
        chi = character_values(rows, g, sector, signed)
        total += int(np.dot(chi, chi))
    return Fraction(total, len(enum))


class InducedFunction:
    """X(m) (even sector) or Y(m) (odd sector) as a function on G.

    Supported on the coset H(base) t where t{m} = base, with
    value eps_base(h) eps_m(t) at h t.
    """

    def __init__(self, m: Characteristic, t: SymplecticF2 | None = None):
        self.m = m
        self.sector = parity(m)
        self.base = sector_base(m.g, self.sector)
        self.t = t if t is not None else transporter(m, self.base)
        if affine_action(self.t, m) != self.base:
            raise ValueError("t does not carry m to the base characteristic")
        self._t_inv = self.t.inverse()

    def in_support(self, x: SymplecticF2) -> bool:
        return affine_action(x, self.m) == self.base

    def __call__(self, x: SymplecticF2) -> int:
        if not self.in_support(x):
            return 0
        h = x @ self._t_inv
        return epsilon(h, self.base) * epsilon(self.t, self.m)


def verify_basis_welldefined(m: Characteristic, trials: int = 10,
                             rng: np.random.Generator | None = None) -> bool:
    """Build the induced function from several transporters and compare them
    on random points of the common coset."""
    rng = rng if rng is not None else np.random.default_rng(0)
    base = sector_base(m.g, parity(m))
    t0 = transporter(m, base)
    for _ in range(trials):
        # two transporters differing by random stabilizer elements
        t1 = random_stabilizer_element(base, rng) @ t0
        t2 = random_stabilizer_element(base, rng) @ t0
        f1, f2 = InducedFunction(m, t1), InducedFunction(m, t2)
        x = random_stabilizer_element(base, rng) @ t1
        if not (f1.in_support(x) and f2.in_support(x)):
            return False
        if f1(x) != f2(x):
            return False
    return True


def invariant_subspace_check(basis: Sequence[Sequence], sector: "Parity | str",
                             samples: Sequence[SymplecticF2]) -> bool:
    """True iff rep_matrix(sigma) v stays in span(basis) for all sigma, v."""
    sector = Parity.parse(sector)
    vecs = [exact.integer_vector(v) for v in basis]
    if not vecs:
        return True
    k = len(vecs[0])
    for sigma in samples:
        if len(characteristics(sigma.g, sector)) != k:
            raise ValueError("basis vectors do not match the sector dimension")
    r = exact.rank(vecs)
    images = [rep_matrix(s, sector).apply(v) for s in samples for v in vecs]
    return exact.rank(vecs + images) == r

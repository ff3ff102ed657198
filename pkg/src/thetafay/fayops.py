"""Fay's operators M+ and M- on the even/odd characteristic spaces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .chargeom import Parity, SymplecticF2, characteristics, count, pairing_e

MAX_FAY_GENUS = 4


class PaperFalsified(RuntimeError):
    """An eigenvector outside the two predicted eigenspaces turned up."""


@dataclass(frozen=True)
class FayOperator:
    g: int
    sector: Parity
    mat: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.mat)

    def to_numpy(self) -> np.ndarray:
        return np.array(self.mat, dtype=np.int64)

    def eigenvalues(self) -> tuple[int, int]:
        """(V-eigenvalue, W-eigenvalue) for this sector."""
        return eigenvalues(self.g, self.sector)

    def dump(self) -> str:
        lines = [f"{self.size} {self.size}"]
        lines += [" ".join(str(x) for x in row) for row in self.mat]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExactSubspaceBasis:
    eigenvalue: int
    vectors: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class RationalProjector:
    eigenvalue: int
    matrix: tuple[tuple[Fraction, ...], ...]

    def rank(self) -> int:
        return exact.rank([exact.integer_vector(r) for r in self.matrix])


def eigenvalues(g: int, sector: "Parity | str") -> tuple[int, int]:
    if Parity.parse(sector) is Parity.EVEN:
        return -(2 ** (g - 1)), 2 ** g
    return 2 ** (g - 1), -(2 ** g)


def expected_dims(g: int) -> dict[str, int]:
    return {
        "V+": (4 ** g - 1) // 3,
        "W+": (2 ** g + 1) * (2 ** (g - 1) + 1) // 3,
        "V-": (4 ** g - 1) // 3,
        "W-": (2 ** g - 1) * (2 ** (g - 1) - 1) // 3,
    }


def build_fay(g: int, sector: "Parity | str") -> FayOperator:
    if not 1 <= g <= MAX_FAY_GENUS:
        raise ValueError(f"build_fay supports 1 <= g <= {MAX_FAY_GENUS}")
    sector = Parity.parse(sector)
    chars = characteristics(g, sector)
    mat = tuple(tuple(pairing_e(m, n) for n in chars) for m in chars)
    return FayOperator(g, sector, mat)


def _shifted(M: FayOperator, lam: int) -> list[list[int]]:
    return [[x - (lam if i == j else 0) for j, x in enumerate(row)]
            for i, row in enumerate(M.mat)]


def eigenspace(M: FayOperator, lam: int) -> ExactSubspaceBasis:
    basis = exact.nullspace(_shifted(M, lam))
    return ExactSubspaceBasis(lam, tuple(tuple(v) for v in basis))


def exact_eigenspaces(M: FayOperator) -> tuple[ExactSubspaceBasis, ExactSubspaceBasis]:
    """(V, W): exact kernels of M - lambda I for the two predicted eigenvalues.

    Raises PaperFalsified if the two kernels do not fill the whole space.
    """
    lam_v, lam_w = M.eigenvalues()
    V = eigenspace(M, lam_v)
    W = eigenspace(M, lam_w)
    if V.dim + W.dim != M.size:
        raise PaperFalsified(
            f"g={M.g} {M.sector.value}: eigenspaces for {lam_v}, {lam_w} have dims "
            f"{V.dim}+{W.dim} != {M.size}; M has another eigenvalue")
    return V, W


def dims(g: int) -> dict[str, int]:
    out = {}
    for sector, tag in ((Parity.EVEN, "+"), (Parity.ODD, "-")):
        V, W = exact_eigenspaces(build_fay(g, sector))
        out["V" + tag] = V.dim
        out["W" + tag] = W.dim
    return out


def quadratic_relation_holds(M: FayOperator) -> bool:
    """M^2 = s 2^{g-1} M + 2^{2g-1} I, with s = +1 (even) or -1 (odd)."""
    g = M.g
    s = 1 if M.sector is Parity.EVEN else -1
    X = M.to_numpy()
    rhs = s * 2 ** (g - 1) * X + 2 ** (2 * g - 1) * np.eye(M.size, dtype=np.int64)
    return bool(np.array_equal(X @ X, rhs))


def projector(M: FayOperator, which: int) -> RationalProjector:
    """(M - other I) / (which - other)."""
    lam_v, lam_w = M.eigenvalues()
    if which not in (lam_v, lam_w):
        raise ValueError(f"{which} is not an eigenvalue of this operator")
    other = lam_w if which == lam_v else lam_v
    den = which - other
    mat = tuple(tuple(Fraction(x - (other if i == j else 0), den) for j, x in enumerate(row))
                for i, row in enumerate(M.mat))
    return RationalProjector(which, mat)


def commutation_check(sigma: SymplecticF2, M: FayOperator) -> bool:
    from .indrep import rep_matrix

    P = rep_matrix(sigma, M.sector).to_numpy()
    X = M.to_numpy()
    return bool(np.array_equal(P @ X, X @ P))


def distinguished_vectors(g: int) -> tuple[list[int], list[int]]:
    """(2^g - 1) e_0 - sum_{m != 0} e_m and (2^g + 1) e_0 + sum_{m != 0} e_m."""
    k = count(g, Parity.EVEN)
    # the zero characteristic is first in canonical order
    u_v = [2 ** g - 1] + [-1] * (k - 1)
    u_w = [2 ** g + 1] + [1] * (k - 1)
    return u_v, u_w


def w_plus_vector(g: int) -> list[int]:
    """(2^{g-1} + 1) e_0 + sum_{m != 0} e_m, the W+ projection of e_0 (scaled).

    (M + 2^{g-1} I) e_0 has exactly these entries, so it lies in W+.  The
    vector with leading entry 2^g + 1 from ``distinguished_vectors`` does not.
    """
    k = count(g, Parity.EVEN)
    return [2 ** (g - 1) + 1] + [1] * (k - 1)


def is_eigenvector(M: FayOperator, v, lam: int) -> bool:
    return exact.matvec(M.mat, v) == [lam * x for x in v]

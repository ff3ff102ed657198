"""Characteristics over F2 and the affine action of Sp(g, F2) on them.

Bit layout used throughout the package:

* ``BitVec``: coordinate ``i`` lives at bit ``i`` of ``bits``.
* ``F2Matrix``: row-major, each row an int with column ``j`` at bit ``j``.
* ``Characteristic``: ``code`` packs ``a`` into bits ``0..g-1`` and ``b``
  into bits ``g..2g-1``.  The canonical *ordering* is different: it is the
  lexicographic order of the string ``a1..ag b1..bg`` (see ``sort_key``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence


class GenusMismatch(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


def _parity(x: int) -> int:
    return x.bit_count() & 1 if hasattr(x, "bit_count") else bin(x).count("1") & 1


@dataclass(frozen=True)
class BitVec:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("BitVec length must be >= 1")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"payload {self.bits:#x} exceeds {self.length} bits")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitVec":
        bits = 0
        for i, v in enumerate(values):
            if v & 1:
                bits |= 1 << i
        return cls(len(values), bits)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.length

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def dot(self, other: "BitVec") -> int:
        if other.length != self.length:
            raise ValueError("length mismatch")
        return _parity(self.bits & other.bits)

    def __add__(self, other: "BitVec") -> "BitVec":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BitVec(self.length, self.bits ^ other.bits)

    __xor__ = __add__

    def __str__(self) -> str:
        return "".join(str(v) for v in self.to_list())


@dataclass(frozen=True)
class F2Matrix:
    """Dense matrix over F2 stored as packed rows."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError("row count does not match payload")
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row payload exceeds column count")

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> "F2Matrix":
        nrows = len(entries)
        ncols = len(entries[0]) if nrows else 0
        rows = []
        for row in entries:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            rows.append(BitVec.from_list(row).bits if ncols else 0)
        return cls(nrows, ncols, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "F2Matrix":
        return cls(nrows, ncols, (0,) * nrows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def transpose(self) -> "F2Matrix":
        out = [0] * self.ncols
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    out[j] |= 1 << i
                r >>= 1
                j += 1
        return F2Matrix(self.ncols, self.nrows, tuple(out))

    @property
    def T(self) -> "F2Matrix":
        return self.transpose()

    def __matmul__(self, other):
        if isinstance(other, BitVec):
            if other.length != self.ncols:
                raise ValueError("dimension mismatch in matrix-vector product")
            bits = 0
            for i, r in enumerate(self.rows):
                if _parity(r & other.bits):
                    bits |= 1 << i
            return BitVec(self.nrows, bits)
        if not isinstance(other, F2Matrix):
            return NotImplemented
        if other.nrows != self.ncols:
            raise ValueError(
                f"dimension mismatch: {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        orows = other.rows
        out = []
        for r in self.rows:
            acc = 0
            j = 0
            while r:
                if r & 1:
                    acc ^= orows[j]
                r >>= 1
                j += 1
            out.append(acc)
        return F2Matrix(self.nrows, other.ncols, tuple(out))

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return F2Matrix(self.nrows, self.ncols,
                        tuple(x ^ y for x, y in zip(self.rows, other.rows)))

    def inverse(self) -> "F2Matrix":
        """Gauss-Jordan inverse on packed rows; raises SingularMatrix."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        # augmented rows: left block in the low n bits, identity above it
        work = [r | (1 << (n + i)) for i, r in enumerate(self.rows)]
        for col in range(n):
            bit = 1 << col
            piv = next((i for i in range(col, n) if work[i] & bit), None)
            if piv is None:
                raise SingularMatrix("matrix is singular over F2")
            work[col], work[piv] = work[piv], work[col]
            prow = work[col]
            for i in range(n):
                if i != col and work[i] & bit:
                    work[i] ^= prow
        mask = (1 << n) - 1
        return F2Matrix(n, n, tuple((w >> n) & mask for w in work))

    def block(self, r0: int, c0: int, nr: int, nc: int) -> "F2Matrix":
        mask = (1 << nc) - 1
        return F2Matrix(nr, nc, tuple((self.rows[r0 + i] >> c0) & mask for i in range(nr)))

    def diagonal(self) -> BitVec:
        n = min(self.nrows, self.ncols)
        return BitVec(n, sum(((self.rows[i] >> i) & 1) << i for i in range(n)))

    def trace(self) -> int:
        return _parity(self.diagonal().bits)

    def quad(self, v: BitVec) -> int:
        """v' M v over F2 (the A[v] notation)."""
        return v.dot(self @ v)

    def is_symmetric(self) -> bool:
        return self == self.transpose()

    def __str__(self) -> str:
        return "\n".join("".join(str(x) for x in row) for row in self.to_lists())


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @classmethod
    def parse(cls, value: "str | Parity") -> "Parity":
        if isinstance(value, Parity):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Characteristic:
    g: int
    a: BitVec
    b: BitVec
    code: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.a.length != self.g or self.b.length != self.g:
            raise ValueError("characteristic halves must have length g")
        object.__setattr__(self, "code", self.a.bits | (self.b.bits << self.g))

    @classmethod
    def from_code(cls, g: int, code: int) -> "Characteristic":
        mask = (1 << g) - 1
        return cls(g, BitVec(g, code & mask), BitVec(g, (code >> g) & mask))

    @classmethod
    def from_lists(cls, a: Sequence[int], b: Sequence[int]) -> "Characteristic":
        if len(a) != len(b):
            raise ValueError("a and b must have the same length")
        return cls(len(a), BitVec.from_list(a), BitVec.from_list(b))

    @classmethod
    def parse(cls, text: str) -> "Characteristic":
        """Parse the canonical ``a1..ag|b1..bg`` form."""
        try:
            left, right = text.strip().split("|")
        except ValueError:
            raise ValueError(f"expected 'a1..ag|b1..bg', got {text!r}") from None
        if len(left) != len(right) or not left or set(left + right) - {"0", "1"}:
            raise ValueError(f"bad characteristic string {text!r}")
        return cls.from_lists([int(c) for c in left], [int(c) for c in right])

    @classmethod
    def zero(cls, g: int) -> "Characteristic":
        return cls(g, BitVec(g), BitVec(g))

    @property
    def sort_key(self) -> int:
        key = 0
        for bit in self.a.to_list() + self.b.to_list():
            key = (key << 1) | bit
        return key

    def __lt__(self, other: "Characteristic") -> bool:
        return (self.g, self.sort_key) < (other.g, other.sort_key)

    def __str__(self) -> str:
        return f"{self.a}|{self.b}"

    def is_zero(self) -> bool:
        return self.code == 0


@lru_cache(maxsize=None)
def odd_base(g: int) -> Characteristic:
    """The fixed odd characteristic with a = b = (1, 0, ..., 0)."""
    e1 = BitVec(g, 1)
    return Characteristic(g, e1, e1)


@dataclass(frozen=True)
class SymplecticF2:
    g: int
    mat: F2Matrix

    def __post_init__(self):
        n = 2 * self.g
        if (self.mat.nrows, self.mat.ncols) != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix")

    @classmethod
    def checked(cls, g: int, mat: F2Matrix) -> "SymplecticF2":
        s = cls(g, mat)
        if not is_symplectic(mat):
            raise ValueError("matrix does not preserve the symplectic form")
        return s

    @classmethod
    def from_blocks(cls, A: F2Matrix, B: F2Matrix, C: F2Matrix, D: F2Matrix,
                    check: bool = True) -> "SymplecticF2":
        g = A.nrows
        rows = [A.rows[i] | (B.rows[i] << g) for i in range(g)]
        rows += [C.rows[i] | (D.rows[i] << g) for i in range(g)]
        mat = F2Matrix(2 * g, 2 * g, tuple(rows))
        return cls.checked(g, mat) if check else cls(g, mat)

    @classmethod
    def from_code(cls, g: int, code: int) -> "SymplecticF2":
        n = 2 * g
        mask = (1 << n) - 1
        return cls(g, F2Matrix(n, n, tuple((code >> (n * i)) & mask for i in range(n))))

    @classmethod
    def identity(cls, g: int) -> "SymplecticF2":
        return cls(g, F2Matrix.identity(2 * g))

    @property
    def code(self) -> int:
        n = 2 * self.g
        return sum(r << (n * i) for i, r in enumerate(self.mat.rows))

    @property
    def A(self) -> F2Matrix:
        return self.mat.block(0, 0, self.g, self.g)

    @property
    def B(self) -> F2Matrix:
        return self.mat.block(0, self.g, self.g, self.g)

    @property
    def C(self) -> F2Matrix:
        return self.mat.block(self.g, 0, self.g, self.g)

    @property
    def D(self) -> F2Matrix:
        return self.mat.block(self.g, self.g, self.g, self.g)

    def __matmul__(self, other: "SymplecticF2") -> "SymplecticF2":
        if not isinstance(other, SymplecticF2):
            return NotImplemented
        if other.g != self.g:
            raise GenusMismatch(f"genus {self.g} vs {other.g}")
        return SymplecticF2(self.g, self.mat @ other.mat)

    def inverse(self) -> "SymplecticF2":
        return SymplecticF2(self.g, self.mat.inverse())

    def is_identity(self) -> bool:
        return self.mat == F2Matrix.identity(2 * self.g)


@lru_cache(maxsize=None)
def form_J(g: int) -> F2Matrix:
    """The matrix (0, I; I, 0) over F2."""
    return F2Matrix(2 * g, 2 * g,
                    tuple([1 << (g + i) for i in range(g)] + [1 << i for i in range(g)]))


def is_symplectic(mat: F2Matrix) -> bool:
    if mat.nrows != mat.ncols or mat.nrows % 2:
        return False
    J = form_J(mat.nrows // 2)
    return mat.transpose() @ J @ mat == J


def _check_genus(*gs: int) -> None:
    if len(set(gs)) != 1:
        raise GenusMismatch(f"genus mismatch: {gs}")


def parity(m: Characteristic) -> Parity:
    return Parity.ODD if m.a.dot(m.b) else Parity.EVEN


def pairing(m: Characteristic, n: Characteristic) -> int:
    """The symplectic form a'beta + b'alpha, in F2."""
    _check_genus(m.g, n.g)
    return m.a.dot(n.b) ^ m.b.dot(n.a)


def pairing_e(m: Characteristic, n: Characteristic) -> int:
    return -1 if pairing(m, n) else 1


def affine_action(sigma: SymplecticF2, m: Characteristic) -> Characteristic:
    """sigma{m} = sigma'^{-1} m + ((CD')_0; (AB')_0).

    For symplectic sigma over F2 one has sigma'^{-1} = J sigma J, so the
    linear part is (D a + C b; B a + A b) and no inversion is needed.
    """
    _check_genus(sigma.g, m.g)
    g = sigma.g
    rows = sigma.mat.rows
    lo = (1 << g) - 1
    swapped = m.b.bits | (m.a.bits << g)
    a_new = 0
    b_new = 0
    for i in range(g):
        top, bot = rows[i], rows[g + i]
        # (C D')_0 and (A B')_0 are row-wise dot products of the blocks
        a_bit = _parity(bot & swapped) ^ _parity(bot & lo & (bot >> g))
        b_bit = _parity(top & swapped) ^ _parity(top & lo & (top >> g))
        a_new |= a_bit << i
        b_new |= b_bit << i
    return Characteristic(g, BitVec(g, a_new), BitVec(g, b_new))


def epsilon_exponent(sigma: SymplecticF2, m: Characteristic) -> int:
    """tr(B'C) + (B'D)[a] + (A'C)[b] reduced mod 2."""
    _check_genus(sigma.g, m.g)
    g = sigma.g
    rows = sigma.mat.rows
    lo = (1 << g) - 1
    a, b = m.a.bits, m.b.bits
    e = 0
    for k in range(g):
        A_k, B_k = rows[k] & lo, rows[k] >> g
        C_k, D_k = rows[g + k] & lo, rows[g + k] >> g
        e ^= _parity(B_k & C_k)
        # a'B'Da = (Ba).(Da), b'A'Cb = (Ab).(Cb)
        e ^= _parity(B_k & a) & _parity(D_k & a)
        e ^= _parity(A_k & b) & _parity(C_k & b)
    return e


def epsilon(sigma: SymplecticF2, m: Characteristic) -> int:
    return -1 if epsilon_exponent(sigma, m) else 1


@lru_cache(maxsize=None)
def _characteristics(g: int, par: Parity | None) -> tuple[Characteristic, ...]:
    allc = sorted(Characteristic.from_code(g, c) for c in range(1 << (2 * g)))
    if par is None:
        return tuple(allc)
    return tuple(m for m in allc if parity(m) is par)


def characteristics(g: int, par: "Parity | str | None" = None) -> tuple[Characteristic, ...]:
    """All characteristics of genus g in canonical order, optionally one parity."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    return _characteristics(g, None if par is None else Parity.parse(par))


@lru_cache(maxsize=None)
def _index(g: int, par: Parity) -> dict[Characteristic, int]:
    return {m: i for i, m in enumerate(_characteristics(g, par))}


def char_index(g: int, par: "Parity | str") -> dict[Characteristic, int]:
    return _index(g, Parity.parse(par))


def count(g: int, par: "Parity | str") -> int:
    """k_g^{+-} = 2^{g-1}(2^g +- 1)."""
    s = 1 if Parity.parse(par) is Parity.EVEN else -1
    return 2 ** (g - 1) * (2 ** g + s)


def translation(S: F2Matrix) -> SymplecticF2:
    """T_S = (I, S; 0, I) for symmetric S."""
    g = S.nrows
    if not S.is_symmetric():
        raise ValueError("translation needs a symmetric S")
    I = F2Matrix.identity(g)
    return SymplecticF2.from_blocks(I, S, F2Matrix.zeros(g, g), I, check=False)


def swap_J(g: int) -> SymplecticF2:
    return SymplecticF2(g, form_J(g))


def iter_codes(ms: Iterable[Characteristic]) -> list[int]:
    return [m.code for m in ms]

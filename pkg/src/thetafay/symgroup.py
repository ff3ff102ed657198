"""Sp(g, F2): generators, BFS enumeration, stabilizers, orbits and transporters.

Group elements are handled in bulk as ``(N, 2g)`` uint64 arrays of packed
rows (same layout as ``F2Matrix.rows``) or as their canonical codes, the
4g^2-bit integer formed by concatenating the rows.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from math import prod
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .chargeom import (
    Characteristic,
    F2Matrix,
    Parity,
    SymplecticF2,
    affine_action,
    characteristics,
    count,
    parity,
    swap_J,
    translation,
)

MAX_ENUM_GENUS = 3


class GenusTooLarge(ValueError):
    pass


class ParityMismatch(ValueError):
    pass


def sp_order(g: int) -> int:
    """|Sp(g, F2)| = 2^{g^2} prod_{i=1}^{g} (4^i - 1)."""
    return 2 ** (g * g) * prod(4 ** i - 1 for i in range(1, g + 1))


@dataclass(frozen=True)
class GeneratorSet:
    """Mod-2 images of the standard integral generators.

    ``tags[i]`` is ``("J", None)`` for the swap or ``("T", S)`` for a
    translation, where ``S`` is the symmetric 0/1 matrix as nested tuples.
    """

    g: int
    elements: tuple[SymplecticF2, ...]
    tags: tuple[tuple[str, tuple | None], ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[SymplecticF2]:
        return iter(self.elements)

    def translations(self) -> list[tuple[SymplecticF2, tuple]]:
        return [(s, t[1]) for s, t in zip(self.elements, self.tags) if t[0] == "T"]


@lru_cache(maxsize=None)
def generators(g: int) -> GeneratorSet:
    if g < 1:
        raise ValueError("genus must be >= 1")
    elements = [swap_J(g)]
    tags: list[tuple[str, tuple | None]] = [("J", None)]
    for i in range(g):
        for j in range(i, g):
            rows = [0] * g
            rows[i] |= 1 << j
            rows[j] |= 1 << i
            S = F2Matrix(g, g, tuple(rows))
            elements.append(translation(S))
            tags.append(("T", tuple(tuple(r) for r in S.to_lists())))
    return GeneratorSet(g, tuple(elements), tuple(tags))


# ---------------------------------------------------------------------------
# bulk arithmetic on packed rows


def rows_to_codes(rows: np.ndarray, g: int) -> np.ndarray:
    n = 2 * g
    codes = np.zeros(rows.shape[0], dtype=np.uint64)
    for i in range(n):
        codes |= rows[:, i] << np.uint64(n * i)
    return codes


def codes_to_rows(codes: np.ndarray, g: int) -> np.ndarray:
    n = 2 * g
    mask = np.uint64((1 << n) - 1)
    codes = np.asarray(codes, dtype=np.uint64)
    return np.stack([(codes >> np.uint64(n * i)) & mask for i in range(n)], axis=1)


def left_multiply(left: SymplecticF2, rows: np.ndarray) -> np.ndarray:
    """Rows of ``left @ X`` for every X in the batch."""
    out = np.zeros_like(rows)
    for i, r in enumerate(left.mat.rows):
        j = 0
        while r:
            if r & 1:
                out[:, i] ^= rows[:, j]
            r >>= 1
            j += 1
    return out


def _par(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x) & np.uint8(1)


def batch_action(rows: np.ndarray, g: int, m_code: int) -> np.ndarray:
    """Codes of sigma{m} for every sigma in the batch."""
    lo = np.uint64((1 << g) - 1)
    sg = np.uint64(g)
    swapped = np.uint64(((m_code >> g) | ((m_code & ((1 << g) - 1)) << g)))
    out = np.zeros(rows.shape[0], dtype=np.uint64)
    for i in range(g):
        top, bot = rows[:, i], rows[:, g + i]
        a_bit = _par(bot & swapped) ^ _par(bot & lo & (bot >> sg))
        b_bit = _par(top & swapped) ^ _par(top & lo & (top >> sg))
        out |= a_bit.astype(np.uint64) << np.uint64(i)
        out |= b_bit.astype(np.uint64) << np.uint64(g + i)
    return out


def batch_epsilon_exponent(rows: np.ndarray, g: int, m_code: int) -> np.ndarray:
    lo = np.uint64((1 << g) - 1)
    sg = np.uint64(g)
    a = np.uint64(m_code & ((1 << g) - 1))
    b = np.uint64(m_code >> g)
    e = np.zeros(rows.shape[0], dtype=np.uint8)
    for k in range(g):
        A_k, B_k = rows[:, k] & lo, rows[:, k] >> sg
        C_k, D_k = rows[:, g + k] & lo, rows[:, g + k] >> sg
        e ^= _par(B_k & C_k)
        e ^= _par(B_k & a) & _par(D_k & a)
        e ^= _par(A_k & b) & _par(C_k & b)
    return e


def is_symplectic_batch(rows: np.ndarray, g: int) -> np.ndarray:
    """sigma' J sigma == J for every row block, i.e. <col_i, col_j> = J_ij."""
    n = 2 * g
    lo = np.uint64((1 << g) - 1)
    sg = np.uint64(g)
    # column j of sigma as a bitmask over rows
    cols = []
    for j in range(n):
        c = np.zeros(rows.shape[0], dtype=np.uint64)
        for i in range(n):
            c |= ((rows[:, i] >> np.uint64(j)) & np.uint64(1)) << np.uint64(i)
        cols.append(c)
    ok = np.ones(rows.shape[0], dtype=bool)
    for i in range(n):
        for j in range(n):
            x, y = cols[i], cols[j]
            form = _par((x & lo) & (y >> sg)) ^ _par((x >> sg) & (y & lo))
            expected = 1 if abs(i - j) == g else 0
            ok &= form == expected
    return ok


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class GroupEnumeration:
    g: int
    codes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.codes.shape[0])

    @property
    def rows(self) -> np.ndarray:
        return codes_to_rows(self.codes, self.g)

    def chunks(self, size: int = 1 << 18) -> Iterator[np.ndarray]:
        for start in range(0, len(self), size):
            yield codes_to_rows(self.codes[start:start + size], self.g)

    def __iter__(self) -> Iterator[SymplecticF2]:
        for c in self.codes:
            yield SymplecticF2.from_code(self.g, int(c))

    def __contains__(self, sigma: SymplecticF2) -> bool:
        c = np.uint64(sigma.code)
        i = np.searchsorted(self.codes, c)
        return bool(i < len(self) and self.codes[i] == c)

    def element(self, i: int) -> SymplecticF2:
        return SymplecticF2.from_code(self.g, int(self.codes[i]))


def _bfs_closure(g: int) -> np.ndarray:
    gens = generators(g).elements
    ident = SymplecticF2.identity(g)
    visited = np.array([ident.code], dtype=np.uint64)
    frontier = codes_to_rows(visited, g)
    while frontier.shape[0]:
        cand = np.unique(np.concatenate(
            [rows_to_codes(left_multiply(s, frontier), g) for s in gens]))
        pos = np.searchsorted(visited, cand)
        pos[pos == visited.shape[0]] = 0
        new = cand[visited[pos] != cand]
        visited = np.union1d(visited, new)
        frontier = codes_to_rows(new, g)
    return visited


_ENUM_CACHE: dict[int, GroupEnumeration] = {}


def enumerate_group(g: int) -> GroupEnumeration:
    """All of Sp(g, F2) by BFS closure of ``generators(g)``; g <= 3.

    The result is cached per genus. A disagreement with ``sp_order`` is
    treated as a defect and raises.
    """
    if g > MAX_ENUM_GENUS:
        raise GenusTooLarge(f"enumeration is limited to g <= {MAX_ENUM_GENUS}")
    if g < 1:
        raise ValueError("genus must be >= 1")
    if g not in _ENUM_CACHE:
        codes = _bfs_closure(g)
        if codes.shape[0] != sp_order(g):
            raise RuntimeError(
                f"BFS found {codes.shape[0]} elements, order formula gives {sp_order(g)}")
        _ENUM_CACHE[g] = GroupEnumeration(g, codes)
    return _ENUM_CACHE[g]


def write_enumeration(path: str | Path, enum: GroupEnumeration) -> None:
    """Binary dump: little-endian uint32 g and uint64 count, then one
    ceil(4g^2/8)-byte little-endian record per element."""
    width = (4 * enum.g * enum.g + 7) // 8
    with open(path, "wb") as fh:
        fh.write(struct.pack("<IQ", enum.g, len(enum)))
        for c in enum.codes:
            fh.write(int(c).to_bytes(width, "little"))


def read_enumeration(path: str | Path) -> GroupEnumeration:
    with open(path, "rb") as fh:
        g, n = struct.unpack("<IQ", fh.read(12))
        width = (4 * g * g + 7) // 8
        body = fh.read(n * width)
    if len(body) != n * width:
        raise ValueError("truncated enumeration file")
    codes = np.array([int.from_bytes(body[i * width:(i + 1) * width], "little")
                      for i in range(n)], dtype=np.uint64)
    return GroupEnumeration(g, np.sort(codes))


# ---------------------------------------------------------------------------
# stabilizers, orbits, double cosets


@dataclass(frozen=True)
class Stabilizer:
    base: Characteristic
    codes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.codes.shape[0])

    @property
    def rows(self) -> np.ndarray:
        return codes_to_rows(self.codes, self.base.g)

    def __iter__(self) -> Iterator[SymplecticF2]:
        for c in self.codes:
            yield SymplecticF2.from_code(self.base.g, int(c))


def stabilizer(base: Characteristic, enum: GroupEnumeration | None = None) -> Stabilizer:
    enum = enum or enumerate_group(base.g)
    if enum.g != base.g:
        raise ValueError("enumeration genus does not match the base characteristic")
    keep = []
    for chunk_codes in np.array_split(enum.codes, max(1, len(enum) >> 18)):
        rows = codes_to_rows(chunk_codes, enum.g)
        keep.append(chunk_codes[batch_action(rows, enum.g, base.code) == base.code])
    return Stabilizer(base, np.concatenate(keep))


@lru_cache(maxsize=None)
def action_table(sigma: SymplecticF2) -> tuple[int, ...]:
    """sigma{m} for every code m in 0 .. 4^g - 1."""
    g = sigma.g
    return tuple(affine_action(sigma, Characteristic.from_code(g, c)).code
                 for c in range(1 << (2 * g)))


def _generator_tables(g: int) -> list[tuple[int, ...]]:
    return [action_table(s) for s in generators(g).elements]


def orbit(m: Characteristic) -> set[int]:
    """Codes in the G-orbit of m, by search over generator moves."""
    tables = _generator_tables(m.g)
    seen = {m.code}
    queue = deque([m.code])
    while queue:
        c = queue.popleft()
        for t in tables:
            d = t[c]
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return seen


def transporter(m: Characteristic, target: Characteristic) -> SymplecticF2:
    """Some sigma with sigma{m} = target, found by BFS in the orbit graph."""
    if m.g != target.g:
        raise ValueError("genus mismatch")
    if parity(m) is not parity(target):
        raise ParityMismatch(f"{m} and {target} have different parity")
    g = m.g
    gens = generators(g).elements
    tables = _generator_tables(g)
    parent: dict[int, tuple[int, int] | None] = {m.code: None}
    queue = deque([m.code])
    while queue and target.code not in parent:
        c = queue.popleft()
        for k, t in enumerate(tables):
            d = t[c]
            if d not in parent:
                parent[d] = (c, k)
                queue.append(d)
    if target.code not in parent:
        raise RuntimeError("target not reachable; generator set is incomplete")
    sigma = SymplecticF2.identity(g)
    node = target.code
    steps = []
    while parent[node] is not None:
        prev, k = parent[node]
        steps.append(k)
        node = prev
    # steps were collected target-first; the first move applied is rightmost
    for k in steps:
        sigma = sigma @ gens[k]
    return sigma


def random_element(g: int, rng: np.random.Generator, length: int = 40) -> SymplecticF2:
    """Product of ``length`` uniformly chosen generators."""
    gens = generators(g).elements
    sigma = SymplecticF2.identity(g)
    for k in rng.integers(0, len(gens), size=length):
        sigma = gens[int(k)] @ sigma
    return sigma


def multiply_batches(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Elementwise products left[t] @ right[t] of two packed batches."""
    n = left.shape[1]
    out = np.zeros_like(right)
    one = np.uint64(1)
    for i in range(n):
        for j in range(n):
            bit = (left[:, i] >> np.uint64(j)) & one
            out[:, i] ^= right[:, j] * bit
    return out


def random_words(g: int, count: int, rng: np.random.Generator, length: int = 40) -> np.ndarray:
    """Packed rows of ``count`` independent random generator words."""
    gens = generators(g).elements
    rows = np.tile(np.array(SymplecticF2.identity(g).mat.rows, dtype=np.uint64), (count, 1))
    for _ in range(length):
        pick = rng.integers(0, len(gens), size=count)
        for k, s in enumerate(gens):
            sel = pick == k
            if sel.any():
                rows[sel] = left_multiply(s, rows[sel])
    return rows


def random_stabilizer_element(base: Characteristic, rng: np.random.Generator,
                              length: int = 40) -> SymplecticF2:
    """A random element of H(base): a random word corrected by a transporter."""
    sigma = random_element(base.g, rng, length)
    return transporter(affine_action(sigma, base), base) @ sigma


def _orbit_count_under(rows: np.ndarray, g: int, points: Sequence[Characteristic]) -> int:
    reps = set()
    for m in points:
        images = np.unique(batch_action(rows, g, m.code))
        reps.add(int(images[0]))
    return len(reps)


def double_coset_count(base: Characteristic, enum: GroupEnumeration | None = None) -> int:
    """|H(base) \\ G / H(base)|, computed as the number of H(base)-orbits on
    the characteristics of the same parity (the coset space G/H(base))."""
    stab = stabilizer(base, enum)
    return _orbit_count_under(stab.rows, base.g, characteristics(base.g, parity(base)))


def _pair_orbit_by_generators(start: tuple[int, int], g: int) -> set[tuple[int, int]]:
    tables = _generator_tables(g)
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for t in tables:
            p = (t[x], t[y])
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return seen


def _pair_orbit_exhaustive(start: tuple[int, int], enum: GroupEnumeration) -> set[tuple[int, int]]:
    seen: set[tuple[int, int]] = set()
    for rows in enum.chunks():
        xs = batch_action(rows, enum.g, start[0])
        ys = batch_action(rows, enum.g, start[1])
        seen.update(zip(xs.tolist(), ys.tolist()))
    return seen


def transitivity_report(g: int, enum: GroupEnumeration | None = None,
                        exhaustive: bool | None = None) -> dict:
    """Orbit sizes for the (double) transitivity claims on characteristics.

    With ``exhaustive`` (default for g <= 2) every group element is applied
    to a base point or pair; otherwise orbits are grown from the generators.
    """
    if exhaustive is None:
        exhaustive = g <= 2
    if exhaustive:
        enum = enum or enumerate_group(g)
    even = characteristics(g, Parity.EVEN)
    odd = characteristics(g, Parity.ODD)
    kp, km = count(g, Parity.EVEN), count(g, Parity.ODD)

    def pair_orbit(x: Characteristic, y: Characteristic) -> int:
        start = (x.code, y.code)
        if exhaustive:
            return len(_pair_orbit_exhaustive(start, enum))
        return len(_pair_orbit_by_generators(start, g))

    def point_orbit(x: Characteristic) -> int:
        if exhaustive:
            images = set()
            for rows in enum.chunks():
                images.update(batch_action(rows, g, x.code).tolist())
            return len(images)
        return len(orbit(x))

    entries = {
        "even_transitive": (point_orbit(even[0]), kp),
        "odd_transitive": (point_orbit(odd[0]), km),
        "even_double_transitive": (pair_orbit(even[0], even[1]) if kp > 1 else 0, kp * (kp - 1)),
        "odd_double_transitive": (pair_orbit(odd[0], odd[1]) if km > 1 else 0, km * (km - 1)),
        "even_odd_pairs": (pair_orbit(even[0], odd[0]), kp * km),
    }
    report = {"g": g, "method": "exhaustive" if exhaustive else "generator-orbits"}
    for name, (size, expected) in entries.items():
        report[name] = {"orbit_size": size, "expected": expected, "ok": size == expected}
    report["ok"] = all(v["ok"] for k, v in report.items() if isinstance(v, dict))
    return report

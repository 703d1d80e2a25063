"""Combinatorics of the determinant expansion.

The determinant of the perturbed coupling matrix, times prod(1 - u_i^4),
is an even polynomial in q whose coefficients are signed sums of cyclic
gap-block products.  This module enumerates gap compositions and their
cyclic orbits, evaluates the block products, and compiles the
polynomial-in-q^2 expansion once per subset so the quadrature loop only
multiplies precomputed blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import PositivityError

__all__ = [
    "Composition",
    "CompositionOrbit",
    "compositions",
    "cyclic_orbits",
    "subset_to_gaps",
    "c_factor",
    "v_factor",
    "u_factor",
    "DenExpansion",
    "den_expansion",
    "den_evaluator",
    "integrand_denominator",
]

_MAX_SUBSET = 12  # 2k above this would mean 2^(2k-1) block products per point


@dataclass(frozen=True)
class Composition:
    """Ordered tuple of positive parts."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(t < 1 for t in self.parts):
            raise ValueError(f"parts must be positive integers, got {self.parts}")

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    def rotations(self) -> list[tuple[int, ...]]:
        t = self.parts
        return [t[i:] + t[:i] for i in range(len(t))]

    def starts(self) -> tuple[int, ...]:
        """1-based subset realizing these gaps, anchored at position 1."""
        out = [1]
        for t in self.parts[:-1]:
            out.append(out[-1] + t)
        return tuple(out)


@dataclass(frozen=True)
class CompositionOrbit:
    """Cyclic-rotation orbit with its subset-counting weight.

    ``weight = total / stabilizer_size`` counts the subsets of an
    ``total``-element cycle whose gap pattern lies in this orbit.
    """

    representative: Composition
    stabilizer_size: int
    weight: int


def compositions(m: int, n: int) -> list[Composition]:
    """All compositions of n into m positive parts, lexicographically."""
    if m < 1 or m > n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    out: list[Composition] = []

    def rec(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            out.append(Composition(tuple(prefix + [remaining])))
            return
        for first in range(1, remaining - slots + 2):
            rec(prefix + [first], remaining - first, slots - 1)

    rec([], n, m)
    return out


def cyclic_orbits(comps: Sequence[Composition]) -> list[CompositionOrbit]:
    """Partition equal-length compositions into cyclic orbits.

    The representative is the lexicographically largest rotation, the
    stabilizer size is m / (number of distinct rotations).
    """
    lengths = {c.length for c in comps}
    if len(lengths) > 1:
        raise ValueError(f"compositions must share one length, got {lengths}")
    seen: dict[tuple[int, ...], CompositionOrbit] = {}
    order: list[tuple[int, ...]] = []
    for comp in comps:
        rots = comp.rotations()
        rep = max(rots)
        if rep in seen:
            continue
        stab = comp.length // len(set(rots))
        weight = comp.total // stab
        seen[rep] = CompositionOrbit(Composition(rep), stab, weight)
        order.append(rep)
    return [seen[r] for r in order]


def subset_to_gaps(positions: Iterable[int], n: int) -> Composition:
    """Cyclic gaps of a sorted subset of {1..n}; the last gap wraps around."""
    pos = sorted(int(p) for p in positions)
    if not pos:
        raise ValueError("subset must be nonempty")
    if len(set(pos)) != len(pos) or pos[0] < 1 or pos[-1] > n:
        raise ValueError(f"positions must be distinct and within 1..{n}, got {pos}")
    gaps = [pos[i + 1] - pos[i] for i in range(len(pos) - 1)]
    gaps.append(n + pos[0] - pos[-1])
    return Composition(tuple(gaps))


def _cyclic_blocks(positions: Sequence[int], n: int) -> list[tuple[int, ...]]:
    """0-based index runs [j_i, j_{i+1}) around the cycle."""
    pos = sorted(positions)
    blocks = []
    for i, lo in enumerate(pos):
        hi = pos[i + 1] if i + 1 < len(pos) else pos[0] + n
        blocks.append(tuple((x - 1) % n for x in range(lo, hi)))
    return blocks


def _block_product(u4: np.ndarray, block: tuple[int, ...]) -> np.ndarray:
    return np.prod(u4[..., list(block)], axis=-1)


def v_factor(u: np.ndarray) -> np.ndarray:
    """(1 - u_1^2 ... u_n^2)^2, the unperturbed determinant numerator."""
    u = np.asarray(u, dtype=float)
    return (1.0 - np.prod(u ** 2, axis=-1)) ** 2


def c_factor(u: np.ndarray, positions: Iterable[int]) -> np.ndarray | float:
    """Product of ``1 - prod(u^4)`` over the cyclic gap blocks of a subset.

    The empty subset returns the squared two-power product ``v_factor``.
    Accepts a single point (shape (n,)) or a batch (..., n).
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    pos = sorted(positions)
    if not pos:
        out = v_factor(u)
    else:
        if pos[0] < 1 or pos[-1] > n or len(set(pos)) != len(pos):
            raise ValueError(f"positions must be distinct and within 1..{n}, got {pos}")
        u4 = u ** 4
        out = np.ones(u.shape[:-1])
        for block in _cyclic_blocks(pos, n):
            out = out * (1.0 - _block_product(u4, block))
    return float(out) if np.ndim(out) == 0 else out


def u_factor(u: np.ndarray, parts: Sequence[int]) -> np.ndarray | float:
    """Block product for consecutive runs of the given lengths from index 1."""
    comp = Composition(tuple(int(t) for t in parts))
    u = np.asarray(u, dtype=float)
    if comp.total != u.shape[-1]:
        raise ValueError(f"parts sum to {comp.total}, expected {u.shape[-1]}")
    return c_factor(u, comp.starts())


@dataclass(frozen=True, eq=False)
class DenExpansion:
    """Compiled polynomial-in-q^2 expansion of one perturbed determinant.

    ``terms[d]`` lists ``(sign, S)`` pairs: position subsets S of the
    perturbed index set with |S| = 2d and sign ``(-1)^(sum S)``.  Degree 0
    is the empty subset with sign +1; the top degree k carries the single
    full subset with sign (-1)^k.  Evaluation returns

        sum_d (-q^2)^d sum_S sign * c_factor(u, j(S)).
    """

    n: int
    positions: tuple[int, ...]
    terms: dict[int, tuple[tuple[int, tuple[int, ...]], ...]]
    _compiled: list = field(repr=False, default_factory=list)

    def evaluate(self, u: np.ndarray, q: float) -> np.ndarray | float:
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.n:
            raise ValueError(f"expected {self.n} variables, got {u.shape[-1]}")
        u4 = u ** 4
        mq2 = -(q * q)
        total = np.zeros(u.shape[:-1])
        for degree, sign, blocks in self._compiled:
            if blocks is None:
                val = v_factor(u)
            else:
                val = np.ones(u.shape[:-1])
                for block in blocks:
                    val = val * (1.0 - _block_product(u4, block))
            total = total + (mq2 ** degree) * sign * val
        return float(total) if np.ndim(total) == 0 else total


def den_expansion(n: int, positions: Iterable[int]) -> DenExpansion:
    """Expand one perturbed determinant into signed block products."""
    pos = tuple(sorted(int(p) for p in positions))
    k2 = len(pos)
    if k2 == 0 or k2 % 2 != 0:
        raise ValueError(f"subset size must be even and >= 2, got {pos}")
    if k2 > _MAX_SUBSET:
        raise ValueError(f"subset size {k2} exceeds the supported limit {_MAX_SUBSET}")
    if pos[0] < 1 or pos[-1] > n or len(set(pos)) != k2:
        raise ValueError(f"positions must be distinct and within 1..{n}, got {pos}")
    terms: dict[int, tuple[tuple[int, tuple[int, ...]], ...]] = {}
    compiled = []
    for d in range(k2 // 2 + 1):
        entries = []
        for subset in combinations(range(1, k2 + 1), 2 * d):
            sign = (-1) ** (sum(subset))
            entries.append((sign, subset))
            if d == 0:
                compiled.append((0, 1, None))
            else:
                chosen = [pos[s - 1] for s in subset]
                compiled.append((d, sign, tuple(_cyclic_blocks(chosen, n))))
        terms[d] = tuple(entries)
    return DenExpansion(n=n, positions=pos, terms=terms, _compiled=compiled)


def _den_k1(blocks, u, q):
    u4 = u ** 4
    prod = (1.0 - _block_product(u4, blocks[0])) * (1.0 - _block_product(u4, blocks[1]))
    return v_factor(u) + (q * q) * prod


def _den_k2(blocks, u, q):
    # alternate-block merging: the q^2 cross term couples blocks (1,3) and
    # (2,4); the remaining combination carries weight q^2 + q^4
    u4 = u ** 4
    b = [_block_product(u4, blk) for blk in blocks]
    cross = (1.0 - b[0] * b[2]) * (1.0 - b[1] * b[3])
    fine = (1.0 - b[0]) * (1.0 - b[1]) * (1.0 - b[2]) * (1.0 - b[3])
    q2 = q * q
    return v_factor(u) + q2 * cross + (q2 + q2 * q2) * fine


def den_evaluator(n: int, positions: Iterable[int]):
    """Vectorized ``den(u, q)`` for one subset, grouped form where known.

    k = 1 and k = 2 use the closed block groupings; larger subsets fall
    back to the compiled signed expansion.
    """
    pos = tuple(sorted(int(p) for p in positions))
    k = len(pos) // 2
    if k == 1:
        blocks = _cyclic_blocks(pos, n)
        return lambda u, q: _den_k1(blocks, np.asarray(u, dtype=float), q)
    if k == 2:
        blocks = _cyclic_blocks(pos, n)
        return lambda u, q: _den_k2(blocks, np.asarray(u, dtype=float), q)
    return den_expansion(n, pos).evaluate


def integrand_denominator(spec, u: np.ndarray, q: float) -> np.ndarray | float:
    """den(u; q) for a subset, composition or orbit; must come out positive.

    Compositions and orbits are anchored at position 1 (the integral over
    the cube does not depend on the anchor).  A non-positive value aborts
    with a diagnostic instead of letting a square root go complex.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    if isinstance(spec, CompositionOrbit):
        spec = spec.representative
    if isinstance(spec, Composition):
        if spec.total != n:
            raise ValueError(f"composition of {spec.total} does not match n={n}")
        pos = spec.starts()
    else:
        pos = tuple(sorted(int(p) for p in spec))
    den = den_evaluator(n, pos)(u, q)
    bad = np.asarray(den <= 0.0)
    if bad.any():
        where = np.argwhere(bad)
        raise PositivityError(
            f"denominator non-positive for subset {pos} at q={q}; "
            f"first offending point index {where[0] if where.size else '?'}")
    return den

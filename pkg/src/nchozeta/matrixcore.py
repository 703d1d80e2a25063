"""Circulant-tridiagonal coupling matrices and their principal minors.

The kernel of the resolvent power couples neighbouring integration
variables through the real symmetric matrix built by :func:`build_delta`;
the cosine factors of the trace identity add a purely imaginary
alternating diagonal (:func:`build_xi`).  Gaussian integration over R^n
reduces every integral to ``1/sqrt(det)`` of such a complex symmetric
matrix, with the branch fixed pivot-by-pivot: each pivot ratio has
positive real part, so the principal square root is always the right one.

Minor chains are computed in O(n) by symmetric elimination.  Only the
last row and column accept fill-in (the matrix is tridiagonal plus a
corner), so the whole chain costs a handful of flops per variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericError
from .special_functions import Params

__all__ = [
    "DeltaMatrix",
    "XiDiagonal",
    "MinorChain",
    "build_delta",
    "build_xi",
    "minor_chain",
    "inv_sqrt_det",
    "ldl_decompose",
    "trace_b_direct",
    "trace_b_expansion",
]

# elimination pivots below this magnitude signal u too close to the boundary
_PIVOT_FLOOR = 1e-280


def _check_u(u: np.ndarray) -> None:
    if u.ndim != 1 or len(u) < 2:
        raise ValueError("need at least two coupling variables")
    if np.any(u < 0.0) or np.any(u >= 1.0):
        raise ValueError(f"coupling variables must lie in [0, 1), got {u!r}")


@dataclass(frozen=True, eq=False)
class DeltaMatrix:
    """Real symmetric circulant-tridiagonal matrix of one integration point.

    Diagonal entry i collects ``1/(1-u_j^4) - 1/2`` from the two adjacent
    variables ``j = i-1, i`` (cyclically); the off-diagonal entry between
    rows i and i+1 is ``-u_i^2/(1-u_i^4)``.  For n = 2 the two neighbour
    couplings land on the same entry and add up.
    """

    u: tuple[float, ...]
    entries: np.ndarray

    @property
    def n(self) -> int:
        return len(self.u)


def build_delta(u: Sequence[float]) -> DeltaMatrix:
    """Assemble the coupling matrix for variables ``u`` in [0, 1)^n.

    u_i = 0 is allowed (the matrix degenerates towards the identity there);
    u_i = 1 is rejected because the entries blow up.
    """
    u = np.asarray(u, dtype=float)
    _check_u(u)
    n = len(u)
    w = 1.0 / (1.0 - u ** 4)
    off = -(u ** 2) * w
    m = np.zeros((n, n))
    for i in range(n):
        m[i, i] = w[i - 1] + w[i] - 1.0
    if n == 2:
        m[0, 1] = m[1, 0] = off[0] + off[1]
    else:
        for i in range(n - 1):
            m[i, i + 1] = m[i + 1, i] = off[i]
        m[0, n - 1] = m[n - 1, 0] = off[n - 1]
    return DeltaMatrix(u=tuple(u.tolist()), entries=m)


@dataclass(frozen=True, eq=False)
class XiDiagonal:
    """Alternating diagonal sign pattern on an even subset of positions."""

    n: int
    positions: tuple[int, ...]
    signs: np.ndarray  # entries in {-1, 0, +1}, alternating -,+ along positions


def build_xi(n: int, positions: Iterable[int]) -> XiDiagonal:
    """Sign pattern (-1, +1, -1, ...) on the sorted 1-based ``positions``."""
    pos = tuple(sorted(int(p) for p in positions))
    if len(pos) == 0 or len(pos) % 2 != 0:
        raise ValueError(f"subset size must be even and >= 2, got {pos}")
    if len(set(pos)) != len(pos) or pos[0] < 1 or pos[-1] > n:
        raise ValueError(f"positions must be distinct and within 1..{n}, got {pos}")
    signs = np.zeros(n)
    for r, p in enumerate(pos, start=1):
        signs[p - 1] = (-1.0) ** r
    return XiDiagonal(n=n, positions=pos, signs=signs)


@dataclass(frozen=True, eq=False)
class MinorChain:
    """Principal minor determinants d_0 = 1, d_1, ..., d_n.

    Every ratio d_{m+1}/d_m sits in the right half plane, and d_n is real:
    the perturbed determinant is even in the coupling q.
    """

    minors: np.ndarray  # complex, length n+1

    @property
    def n(self) -> int:
        return len(self.minors) - 1

    @property
    def det(self) -> complex:
        return self.minors[-1]

    def ratios(self) -> np.ndarray:
        return self.minors[1:] / self.minors[:-1]


def minor_chain(u: Sequence[float], q: float, positions: Iterable[int]) -> MinorChain:
    """Principal minors of the perturbed coupling matrix, in O(n).

    One pass of symmetric (LDL-style) elimination; the k-th minor is the
    product of the first k pivots.  Fill-in is confined to the last row,
    which carries the corner entry.
    """
    u = np.asarray(u, dtype=float)
    _check_u(u)
    n = len(u)
    xi = build_xi(n, positions)
    w = 1.0 / (1.0 - u ** 4)
    off = -(u ** 2) * w
    diag = np.empty(n)
    for i in range(n):
        diag[i] = w[i - 1] + w[i] - 1.0
    a = diag + 1j * float(q) * xi.signs

    piv = np.empty(n, dtype=complex)
    if n == 2:
        b = off[0] + off[1]
        piv[0] = a[0]
        piv[1] = a[1] - b * b / a[0]
    else:
        d = a[0]          # current pivot candidate
        e = off[0]        # entry coupling column k to row k+1
        g = off[n - 1]    # last-row entry in column k (corner, then fill)
        s = a[n - 1]      # trailing corner entry, updated as columns clear
        for k in range(n - 2):
            piv[k] = d
            mult = e / d
            fill = g / d
            s = s - g * fill
            d_next = a[k + 1] - e * mult
            if k + 1 <= n - 3:
                g = -fill * e
                e = off[k + 1]
            else:
                g = off[n - 2] - fill * e
            d = d_next
        piv[n - 2] = d
        piv[n - 1] = s - g * g / d

    if not np.all(np.isfinite(piv)):
        raise NumericError("pivot overflow; coupling variable too close to 1")
    if np.min(np.abs(piv)) < _PIVOT_FLOOR:
        raise NumericError("pivot underflow; coupling variable too close to 1")
    minors = np.concatenate([[1.0 + 0.0j], np.cumprod(piv)])
    if not np.all(np.isfinite(minors)):
        raise NumericError("minor overflow; coupling variable too close to 1")
    return MinorChain(minors=minors)


def inv_sqrt_det(chain: MinorChain) -> float:
    """Branch-correct ``Re prod_m (d_m/d_{m-1})^(-1/2)``.

    Each ratio has positive real part, so the principal square root is the
    branch the Gaussian integral selects.  For the matrices produced here
    the phases cancel and the product is real up to rounding; a residual
    imaginary part above 1e-8 relative is reported as a numeric failure.
    """
    ratios = chain.ratios()
    value = complex(np.prod(1.0 / np.sqrt(ratios)))
    if abs(value.imag) > 1e-8 * abs(value):
        raise NumericError(
            f"inverse sqrt determinant has imaginary residual {value.imag:g} "
            f"relative to {abs(value):g}")
    return value.real


def ldl_decompose(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor a complex symmetric matrix as L diag(pivots) L^T.

    L is unit lower triangular and ``pivots[k] = d_{k+1}/d_k`` is the ratio
    of consecutive principal minors.  No pivoting: all leading minors must
    be invertible.
    """
    a = np.asarray(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    lower = np.eye(n, dtype=complex)
    pivots = np.empty(n, dtype=complex)
    for j in range(n):
        pivots[j] = a[j, j] - np.sum(lower[j, :j] ** 2 * pivots[:j])
        if pivots[j] == 0:
            raise NumericError(f"zero pivot at step {j}; singular principal minor")
        for i in range(j + 1, n):
            lower[i, j] = (a[i, j] - np.sum(lower[i, :j] * lower[j, :j] * pivots[:j])) / pivots[j]
    return lower, pivots


def _pair_matrix(x: float, y: float, p: Params) -> np.ndarray:
    # A^{-1} (cos(t) I + sin(t) J) with t = q (x^2 - y^2)/2
    t = 0.5 * p.q * (x * x - y * y)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c / p.alpha, -s / p.alpha],
                     [s / p.beta, c / p.beta]])


def trace_b_direct(x: Sequence[float], p: Params) -> float:
    """Trace of the cyclic product of the explicit 2x2 kernel factors."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 1:
        raise ValueError("need at least one point")
    prod = np.eye(2)
    for i in range(n):
        prod = prod @ _pair_matrix(x[i], x[(i + 1) % n], p)
    return float(np.trace(prod))


def trace_b_expansion(x: Sequence[float], p: Params) -> float:
    """Same trace through the closed cosine expansion over even subsets.

    Enumerates all 2k-subsets of positions, k = 1..n/2, with the
    alternating quadratic form in the cosine; exponential in n, guarded at
    n <= 20.
    """
    from itertools import combinations

    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 1:
        raise ValueError("need at least one point")
    if n > 20:
        raise ValueError(f"subset enumeration is limited to n <= 20, got {n}")
    xsq = x ** 2
    total = 1.0
    if p.skew_factor != 0.0:
        for k in range(1, n // 2 + 1):
            acc = 0.0
            for subset in combinations(range(n), 2 * k):
                arg = 0.0
                for r, idx in enumerate(subset, start=1):
                    arg += (-1.0) ** r * xsq[idx]
                acc += math.cos(p.q * arg)
            total += p.skew_factor ** k * acc
    return 2.0 * ((p.alpha + p.beta) / (2.0 * p.alpha * p.beta)) ** n * total

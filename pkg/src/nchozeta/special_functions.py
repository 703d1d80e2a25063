"""Scalar special functions and oscillator parameter bookkeeping.

Everything downstream works with the derived quantities collected in
:class:`Params`: the coupling ``q = 1/sqrt(alpha*beta - 1)``, the prefactor
base ``(alpha+beta) / (2*sqrt(alpha*beta*(alpha*beta-1)))`` and the squared
asymmetry ``((alpha-beta)/(alpha+beta))**2``.  The zeta values
``zeta(n, 1/2) = (2^n - 1) zeta(n)`` and the fixed hypergeometric value
``2F1(1/4, 3/4; 1; -q^2)`` are the only transcendental constants needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "Params",
    "derive_params",
    "hurwitz_zeta_half",
    "gauss_2f1_quarter",
    "binom_half",
]


@dataclass(frozen=True)
class Params:
    """Oscillator parameters together with the derived constants.

    Invariants (enforced by :func:`derive_params`):

    * ``alpha > 0``, ``beta > 0``, ``alpha * beta > 1``
    * ``epsilon = 1/sqrt(alpha*beta)`` and ``q = epsilon/sqrt(1-epsilon^2)``
    * ``skew_factor == 0`` exactly when ``alpha == beta``
    """

    alpha: float
    beta: float
    epsilon: float
    q: float
    mean_factor: float
    skew_factor: float

    @property
    def degenerate(self) -> bool:
        return self.alpha == self.beta


def derive_params(alpha: float, beta: float) -> Params:
    """Validate ``(alpha, beta)`` and derive the dependent constants."""
    alpha = float(alpha)
    beta = float(beta)
    if not (alpha > 0.0 and beta > 0.0):
        raise ValueError(f"parameters must be positive, got ({alpha}, {beta})")
    ab = alpha * beta
    if not ab > 1.0:
        raise ValueError(f"need alpha*beta > 1, got alpha*beta = {ab}")
    epsilon = 1.0 / math.sqrt(ab)
    q = 1.0 / math.sqrt(ab - 1.0)
    mean_factor = (alpha + beta) / (2.0 * math.sqrt(ab * (ab - 1.0)))
    skew = 0.0 if alpha == beta else ((alpha - beta) / (alpha + beta)) ** 2
    return Params(alpha, beta, epsilon, q, mean_factor, skew)


@lru_cache(maxsize=None)
def _bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m (B_1 = -1/2 convention) as an exact fraction."""
    if m == 0:
        return Fraction(1)
    acc = Fraction(0)
    for j in range(m):
        acc += math.comb(m + 1, j) * _bernoulli(j)
    return -acc / (m + 1)


def _zeta_even(n: int) -> float:
    # zeta(2m) = (-1)^(m+1) B_{2m} (2 pi)^{2m} / (2 (2m)!)
    m = n // 2
    coeff = (-1) ** (m + 1) * _bernoulli(2 * m) / (2 * math.factorial(2 * m))
    return float(coeff) * (2.0 * math.pi) ** (2 * m)


def _zeta_euler_maclaurin(n: int, cutoff: int = 16, corrections: int = 10) -> float:
    """zeta(n) for integer n >= 2 by Euler-Maclaurin with a checked tail."""
    s = float(n)
    total = sum(k ** -s for k in range(1, cutoff))
    total += 0.5 * cutoff ** -s
    total += cutoff ** (1.0 - s) / (s - 1.0)
    rising = 1.0  # product s (s+1) ... (s + 2j - 2)
    for j in range(1, corrections + 1):
        rising *= s + (2 * j - 2)
        b = float(_bernoulli(2 * j)) / math.factorial(2 * j)
        total += b * rising * cutoff ** (-s - (2 * j - 1))
        rising *= s + (2 * j - 1)
    # magnitude of the first omitted correction bounds the remainder
    nxt = rising * (s + 2 * corrections)
    bound = abs(float(_bernoulli(2 * corrections + 2))
                / math.factorial(2 * corrections + 2)
                * nxt * cutoff ** (-s - (2 * corrections + 1)))
    if bound > 1e-15 * abs(total):
        raise ValueError(f"Euler-Maclaurin tail bound {bound:g} too large for n={n}")
    return total


@lru_cache(maxsize=None)
def hurwitz_zeta_half(n: int) -> float:
    """zeta(n, 1/2) = (2^n - 1) zeta(n) for integer n >= 2.

    Even orders use the closed pi-power form, odd orders Euler-Maclaurin
    summation; both give at least 1e-14 relative accuracy.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"order must be an integer >= 2, got {n!r}")
    zeta_n = _zeta_even(n) if n % 2 == 0 else _zeta_euler_maclaurin(n)
    return (2.0 ** n - 1.0) * zeta_n


def _hyp_series_quarter(w: complex) -> complex:
    # 2F1(1/4, 1/4; 1; w), plain power series; converges for |w| < 1 and,
    # because c - a - b = 1/2 > 0, also at |w| = 1.
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    for k in range(100_000):
        term *= (0.25 + k) * (0.25 + k) / ((1.0 + k) * (1.0 + k)) * w
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
    raise ValueError(f"hypergeometric series did not converge at w={w!r}")


def gauss_2f1_quarter(q: float) -> float:
    """2F1(1/4, 3/4; 1; -q^2) for q >= 0.

    Evaluated through the Pfaff transform
    ``(1+q^2)^(-1/4) * 2F1(1/4, 1/4; 1; q^2/(1+q^2))`` whose series argument
    lies in [0, 1) for every real q, so no analytic continuation is needed.
    """
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    if q == 0.0:
        return 1.0
    w = q * q / (1.0 + q * q)
    return (1.0 + q * q) ** -0.25 * _hyp_series_quarter(w).real


def gauss_2f1_quarter_complex(z: complex) -> complex:
    """Analytic extension of ``q -> 2F1(1/4, 3/4; 1; z)`` for Re z < 1/2.

    Same Pfaff route as :func:`gauss_2f1_quarter`; used to probe the
    differential equation on small circles around points of the negative
    real axis.
    """
    z = complex(z)
    if z.real >= 0.5:
        raise ValueError("argument must satisfy Re z < 1/2")
    w = z / (z - 1.0)
    return (1.0 - z) ** -0.25 * _hyp_series_quarter(w)


def binom_half(m: int) -> float:
    """Generalized binomial coefficient C(-1/2, m)."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    out = 1.0
    for i in range(m):
        out *= (-0.5 - i) / (i + 1.0)
    return out

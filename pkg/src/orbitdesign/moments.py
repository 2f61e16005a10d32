"""Invariant moments of designs on hypercube orbits.

For the uniform design on orbit k the information matrix has only four
distinct off-diagonal entries, the moments m_1..m_4: the average over the
orbit of products of 1, 2, 3 or 4 distinct coordinates.  With t = 2k - K
they have the closed forms

    m_1 = t / K
    m_2 = (t^2 - K) / (K (K-1))
    m_3 = (t^3 - (3K-2) t) / (K (K-1) (K-2))
    m_4 = (t^4 - (6K-8) t^2 + 3 K (K-2)) / (K (K-1) (K-2) (K-3))

for j <= K and m_j = 0 for j > K.  An equivalent combinatorial form counts
sign patterns directly:

    m_j = C(K,k)^-1 * sum_i (-1)^(i+j) C(j,i) C(K-j, k-i).

Both are computed in exact rational arithmetic; mixtures are linear in the
orbit weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exceptions import OrbitDesignError
from .orbits import OrbitDesign

Numeric = Union[Fraction, float, int]


@dataclass(frozen=True)
class MomentSet:
    """The four invariant moments of a design; exact zeros for symmetric odd moments."""

    m1: Numeric
    m2: Numeric
    m3: Numeric
    m4: Numeric

    def __post_init__(self) -> None:
        for name in ("m1", "m2", "m3", "m4"):
            value = getattr(self, name)
            # Small slack: float mixing can overshoot the exact bound by ulps.
            if not -1 - 1e-9 <= value <= 1 + 1e-9:
                raise OrbitDesignError(f"moment {name}={value} outside [-1, 1]")

    def is_symmetric(self) -> bool:
        """True when the odd moments vanish exactly."""
        return self.m1 == 0 and self.m3 == 0

    def as_floats(self) -> "MomentSet":
        return MomentSet(float(self.m1), float(self.m2), float(self.m3), float(self.m4))


def _check_args(k_factors: int, k: int, j: int) -> None:
    if not 0 <= k <= k_factors:
        raise OrbitDesignError(f"orbit index must be in 0..{k_factors}, got {k}")
    if not 1 <= j <= 4:
        raise OrbitDesignError(f"moment order must be in 1..4, got {j}")


def orbit_moment(k_factors: int, k: int, j: int) -> Fraction:
    """Exact j-th moment of the uniform design on orbit k (closed form)."""
    _check_args(k_factors, k, j)
    K = k_factors
    if j > K:
        return Fraction(0)
    t = 2 * k - K
    if j == 1:
        return Fraction(t, K)
    if j == 2:
        return Fraction(t * t - K, K * (K - 1))
    if j == 3:
        return Fraction(t**3 - (3 * K - 2) * t, K * (K - 1) * (K - 2))
    return Fraction(
        t**4 - (6 * K - 8) * t * t + 3 * K * (K - 2),
        K * (K - 1) * (K - 2) * (K - 3),
    )


def orbit_moment_sum(k_factors: int, k: int, j: int) -> Fraction:
    """Same moment via the alternating binomial sum (independent code path).

    Splits the j product coordinates by how many are active: i active ones
    contribute sign (-1)^(j-i), and C(K-j, k-i) points share that pattern.
    """
    _check_args(k_factors, k, j)
    K = k_factors
    total = 0
    for i in range(j + 1):
        remaining = k - i
        if remaining < 0 or remaining > K - j:
            continue
        term = math.comb(j, i) * math.comb(K - j, remaining)
        total += term if (i + j) % 2 == 0 else -term
    return Fraction(total, math.comb(K, k))


def design_moments(design: OrbitDesign) -> MomentSet:
    """Moments of an invariant design: weight-linear mixture of orbit moments.

    Structurally symmetric designs get exact zero odd moments instead of a
    sum of cancelling mirror terms.
    """
    K = design.k_factors
    weights = design.weights()
    exact = all(isinstance(w, (Fraction, int)) for w in weights.values())
    zero: Numeric = Fraction(0) if exact else 0.0

    def mix(j: int) -> Numeric:
        total = sum((w * orbit_moment(K, k, j) for k, w in weights.items()), zero)
        if isinstance(total, float):
            # Roundoff can push a convex combination past the exact bound.
            total = min(1.0, max(-1.0, total))
        return total

    if design.symmetric:
        return MomentSet(zero, mix(2), zero, mix(4))
    return MomentSet(mix(1), mix(2), mix(3), mix(4))

"""Combinatorics of the two-level hypercube {-1,+1}^K.

A design point is a K-tuple with entries -1/+1; its orbit index k is the
number of entries equal to +1 ("active factors").  The permutation group of
the K factors partitions the cube into the K+1 orbits O_0, ..., O_K, and a
permutation-invariant design is fully described by one weight per orbit.
Under the additional sign-flip symmetry, orbits k and K-k are identified
(symmetric orbits), and symmetric designs carry equal weight on both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Mapping, Union

from .exceptions import OrbitDesignError

#: A single setting on the cube; entries are -1 or +1.
DesignPoint = tuple[int, ...]

#: Orbit weights are exact rationals where the construction permits, floats otherwise.
Weight = Union[Fraction, float, int]

# Binomials stay exact in Python for any K, but the library's contracts are
# only exercised for small K; refuse absurd inputs instead of looping forever.
MAX_BINOMIAL_K = 64

WEIGHT_SUM_TOL = 1e-12


def active_count(x: DesignPoint) -> int:
    """Number of +1 entries of a design point (equals (sum(x) + K) / 2)."""
    count = 0
    for entry in x:
        if entry == 1:
            count += 1
        elif entry != -1:
            raise OrbitDesignError(f"design point entries must be -1 or +1, got {entry!r}")
    return count


def orbit_size(k_factors: int, k: int) -> int:
    """Exact size C(K, k) of the orbit with k active factors."""
    if k_factors < 0 or k_factors > MAX_BINOMIAL_K:
        raise OrbitDesignError(f"factor count must be in 0..{MAX_BINOMIAL_K}, got {k_factors}")
    if not 0 <= k <= k_factors:
        raise OrbitDesignError(f"orbit index must be in 0..{k_factors}, got {k}")
    return math.comb(k_factors, k)


def enumerate_orbit(k_factors: int, k: int) -> Iterator[DesignPoint]:
    """Yield the C(K, k) points with k active factors.

    Points are emitted in lexicographic order of their +1-position subsets,
    so the stream is deterministic and the first point has the k leading
    coordinates active.  Intended for K <= 22; larger K is the caller's risk.
    """
    if not 0 <= k <= k_factors:
        raise OrbitDesignError(f"orbit index must be in 0..{k_factors}, got {k}")
    for positions in combinations(range(k_factors), k):
        point = [-1] * k_factors
        for pos in positions:
            point[pos] = 1
        yield tuple(point)


@dataclass(frozen=True)
class Region:
    """Design region: all cube points whose active count lies in [lower, upper]."""

    k_factors: int
    lower: int
    upper: int

    def __post_init__(self) -> None:
        if self.k_factors < 1:
            raise OrbitDesignError(f"factor count must be positive, got {self.k_factors}")
        if not 0 <= self.lower <= self.upper <= self.k_factors:
            raise OrbitDesignError(
                f"need 0 <= lower <= upper <= {self.k_factors}, "
                f"got lower={self.lower}, upper={self.upper}"
            )

    def symmetric(self) -> bool:
        """True when the bounds are mirror images (lower + upper == K)."""
        return self.lower + self.upper == self.k_factors

    def orbit_indices(self) -> range:
        return range(self.lower, self.upper + 1)

    def contains_orbit(self, k: int) -> bool:
        return self.lower <= k <= self.upper


class OrbitDesign:
    """Permutation-invariant approximate design: orbit index -> orbit weight.

    Weights are per orbit (the weight of an individual point is the orbit
    weight divided by the orbit size).  Symmetric designs -- equal weight on
    orbits k and K-k -- store only the half k <= K//2 and mirror on read, so
    the mirror equality cannot drift.
    """

    __slots__ = ("k_factors", "symmetric", "_folded")

    def __init__(
        self,
        k_factors: int,
        weights: Mapping[int, Weight],
        *,
        symmetric: bool = False,
    ) -> None:
        if k_factors < 1:
            raise OrbitDesignError(f"factor count must be positive, got {k_factors}")
        folded: dict[int, Weight] = {}
        for k, w in weights.items():
            if not 0 <= k <= k_factors:
                raise OrbitDesignError(f"orbit index must be in 0..{k_factors}, got {k}")
            if symmetric and k > k_factors // 2:
                raise OrbitDesignError(
                    f"symmetric designs store orbits k <= {k_factors // 2} only, got {k}"
                )
            if w < 0:
                raise OrbitDesignError(f"orbit weight must be nonnegative, got {w} at k={k}")
            if w > 0:
                folded[k] = w
        object.__setattr__(self, "k_factors", k_factors)
        object.__setattr__(self, "symmetric", symmetric)
        object.__setattr__(self, "_folded", folded)
        total = sum(self.weights().values())
        if abs(total - 1) > WEIGHT_SUM_TOL:
            raise OrbitDesignError(f"orbit weights must sum to 1, got {total}")

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("OrbitDesign is immutable")

    def weight(self, k: int) -> Weight:
        """Weight of orbit k; 0 for unsupported orbits."""
        if not 0 <= k <= self.k_factors:
            return 0
        if self.symmetric:
            k = min(k, self.k_factors - k)
        return self._folded.get(k, 0)

    def weights(self) -> dict[int, Weight]:
        """Fully expanded orbit-weight map (mirror orbits included)."""
        if not self.symmetric:
            return dict(self._folded)
        expanded: dict[int, Weight] = {}
        for k, w in self._folded.items():
            expanded[k] = w
            mirror = self.k_factors - k
            if mirror != k:
                expanded[mirror] = w
        return expanded

    def support(self) -> tuple[int, ...]:
        """Sorted orbit indices carrying positive weight."""
        return tuple(sorted(self.weights()))

    def symmetric_support(self) -> tuple[int, ...]:
        """Sorted indices min(k, K-k) of the supported symmetric orbits."""
        return tuple(sorted({min(k, self.k_factors - k) for k in self.weights()}))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrbitDesign):
            return NotImplemented
        return self.k_factors == other.k_factors and self.weights() == other.weights()

    def __hash__(self) -> int:
        return hash((self.k_factors, tuple(sorted(self.weights().items()))))

    def __repr__(self) -> str:
        kind = "symmetric" if self.symmetric else "general"
        entries = ", ".join(f"{k}: {w}" for k, w in sorted(self.weights().items()))
        return f"OrbitDesign(K={self.k_factors}, {kind}, {{{entries}}})"


def point_weight(design: OrbitDesign, k: int) -> Weight:
    """Weight of each individual point of orbit k: orbit weight / C(K, k)."""
    if not 0 <= k <= design.k_factors:
        raise OrbitDesignError(f"orbit index must be in 0..{design.k_factors}, got {k}")
    w = design.weight(k)
    if w == 0:
        return 0
    return w / orbit_size(design.k_factors, k)

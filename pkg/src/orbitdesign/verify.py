"""Optimality certification via the equivalence theorem.

A design maximizes the information determinant over a region exactly when
its sensitivity function psi(x) = f(x)^T M^-1 f(x) stays below the
parameter count p everywhere on the region.  For sign-symmetric invariant
designs psi is constant on orbits and, as a function of t = 2k - K, an even
quartic

    psi_tilde(k) = a4 t^4 + a2 t^2 + a0,

whose coefficients follow from the structured inverse and the identities
x^T x = K, xt^T xt = K(K-1)/2, x^T 1 = t, xt^T 1 = (t^2 - K)/2 and
xt^T S S^T xt = (K-2) t^2 + K (xt the vector of coordinate products).
Checking optimality on a region therefore reduces to a finite maximum of a
quartic over the admitted orbit indices.

A direct summation oracle over enumerated orbits backs all structured
formulas; it accumulates exact integer Gram matrices per orbit and combines
them with the orbit weights, so it is exact whenever the weights are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .exceptions import OrbitDesignError, SingularDesignError
from .info_matrix import (
    InfoMatrix,
    inverse_coefficients,
    interaction_pairs,
    log_det_symmetric,
    model_dims,
    regularity,
)
from .moments import MomentSet, design_moments
from .orbits import OrbitDesign, enumerate_orbit, orbit_size

Numeric = Union[Fraction, float, int]

BRUTE_FORCE_MAX_K = 12


@dataclass(frozen=True)
class SensitivityPoly:
    """Even quartic giving the sensitivity value on each orbit."""

    k_factors: int
    a0: Numeric
    a2: Numeric
    a4: Numeric

    def value(self, k: int) -> Numeric:
        """psi_tilde(k) for orbit index k."""
        t = 2 * k - self.k_factors
        t2 = t * t
        return self.a4 * t2 * t2 + self.a2 * t2 + self.a0


@dataclass(frozen=True)
class KwReport:
    """Result of the equivalence-theorem check over a region of orbits."""

    passed: bool
    max_violation: float
    argmax_orbit: int
    per_orbit: dict[int, float]
    p: int
    tol: float

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"max(psi - p) = {self.max_violation:.3e} at orbit k={self.argmax_orbit} "
            f"(p = {self.p}, tol = {self.tol:.0e}) -> {verdict}"
        )


def sensitivity_poly(k_factors: int, m: MomentSet) -> SensitivityPoly:
    """Coefficients of the orbitwise sensitivity quartic for symmetric moments.

    Exact rational when the moments are exact.  Raises SingularDesignError
    for singular moments.
    """
    K = k_factors
    coeffs = inverse_coefficients(K, m)
    m2, m4 = m.m2, m.m4
    lam_i = 1 - 2 * m2 + m4
    c0, c2 = coeffs.c0, coeffs.c2
    d_s, d_j = coeffs.delta_S, coeffs.delta_J

    a4 = -d_j / (4 * lam_i)
    a2 = -(
        c2
        + m2 / ((1 - m2) * (1 + (K - 1) * m2))
        + d_s * (K - 2) / lam_i
        - d_j * K / (2 * lam_i)
    )
    # The c2*K term comes from expanding the intercept/interaction coupling
    # -2 c2 (t^2 - K)/2 = -c2 t^2 + c2 K.
    a0 = (
        c0
        + c2 * K
        + K / (1 - m2)
        + K * (K - 1) / (2 * lam_i)
        - d_s * K / lam_i
        - d_j * K * K / (4 * lam_i)
    )
    return SensitivityPoly(K, a0, a2, a4)


def kw_check(
    design: OrbitDesign,
    lower: int,
    upper: int,
    tol: float = 1e-9,
) -> KwReport:
    """Equivalence-theorem check of a symmetric design over orbits lower..upper.

    Passing certifies D-optimality among all designs supported on the
    region.  The design must be regular; singular designs raise
    SingularDesignError with the failing block named.
    """
    K = design.k_factors
    if not 0 <= lower <= upper <= K:
        raise OrbitDesignError(f"invalid orbit range [{lower}, {upper}] for K={K}")
    report = regularity(design)
    if not report.regular:
        raise SingularDesignError(report.message())
    m = design_moments(design)
    poly = sensitivity_poly(K, m)
    p = model_dims(K).p

    per_orbit: dict[int, float] = {}
    max_violation = -math.inf
    argmax = lower
    for k in range(lower, upper + 1):
        value = poly.value(k)
        violation = float(value - p)
        per_orbit[k] = float(value)
        if violation > max_violation:
            max_violation = violation
            argmax = k
    return KwReport(max_violation <= tol, max_violation, argmax, per_orbit, p, tol)


def d_efficiency(design: OrbitDesign) -> float:
    """det(M)^(1/p), the efficiency relative to the full factorial; 0 if singular."""
    m = design_moments(design)
    ld = log_det_symmetric(design.k_factors, m)
    if ld == -math.inf:
        return 0.0
    return math.exp(ld / model_dims(design.k_factors).p)


@lru_cache(maxsize=None)
def _orbit_gram(k_factors: int, k: int) -> np.ndarray:
    """Exact integer sum of f(x) f(x)^T over orbit k (cached, read-only)."""
    pairs = interaction_pairs(k_factors)
    p = model_dims(k_factors).p
    features = np.empty((orbit_size(k_factors, k), p), dtype=np.int64)
    for row, x in enumerate(enumerate_orbit(k_factors, k)):
        features[row, 0] = 1
        features[row, 1 : k_factors + 1] = x
        for col, (a, b) in enumerate(pairs):
            features[row, k_factors + 1 + col] = x[a] * x[b]
    gram = features.T @ features
    gram.setflags(write=False)
    return gram


def brute_force_info(
    design: OrbitDesign,
    *,
    exact: bool = False,
    force: bool = False,
) -> InfoMatrix:
    """Information matrix by direct enumeration: sum of w_k / C(K,k) * f f^T.

    The per-orbit Gram matrices are exact integers, so with rational weights
    and exact=True the result is exact.  Guarded to K <= 12 (override with
    force=True).
    """
    K = design.k_factors
    if K > BRUTE_FORCE_MAX_K and not force:
        raise OrbitDesignError(
            f"brute-force enumeration for K={K} > {BRUTE_FORCE_MAX_K} is expensive; "
            "pass force=True to run it anyway"
        )
    dims = model_dims(K)
    weights = design.weights()
    if exact:
        if not all(isinstance(w, (Fraction, int)) for w in weights.values()):
            raise OrbitDesignError("exact mode needs rational orbit weights")
        dense = np.zeros((dims.p, dims.p), dtype=object)
        for k, w in weights.items():
            dense = dense + _orbit_gram(K, k).astype(object) * (
                Fraction(w) / orbit_size(K, k)
            )
    else:
        dense = np.zeros((dims.p, dims.p), dtype=np.float64)
        for k, w in weights.items():
            dense += (float(w) / orbit_size(K, k)) * _orbit_gram(K, k)
    return InfoMatrix(dims, dense, design_moments(design))

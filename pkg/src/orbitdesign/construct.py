"""Construction of D-optimal invariant designs on symmetrically bounded regions.

With L <= active count <= K - L, two regimes exist, separated by the
threshold

    B_K = (K - sqrt(3K - 2)) / 2   (K even)
    B_K = (K - sqrt(3K)) / 2       (K odd).

For L <= B_K ("wide" bounds) designs exist whose information matrix equals
the identity, i.e. they are as good as the full 2^K factorial.  They mix at
most three symmetric orbits: the outermost pair, the central orbit(s), and
one intermediate pair.  For B_K < L < K/2 ("narrow" bounds) the identity is
unattainable and the optimal design puts an optimized weight w* on each
outermost orbit with the remainder on the central orbit(s); w* maximizes
the log determinant over (0, 1/2).

Regime membership is decided in exact integer arithmetic: L <= B_K is
equivalent to (K - 2L)^2 >= 3K - 2 (even K) resp. >= 3K (odd K).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from scipy.optimize import minimize_scalar

from .exceptions import (
    EstimabilityError,
    OrbitDesignError,
    UnsupportedRegionError,
    WrongRegimeError,
)
from .info_matrix import log_det_symmetric, model_dims
from .moments import MomentSet, design_moments, orbit_moment
from .orbits import OrbitDesign, orbit_size
from .verify import KwReport, kw_check


def _threshold_discriminant(k_factors: int) -> int:
    return 3 * k_factors - 2 if k_factors % 2 == 0 else 3 * k_factors


def threshold_b(k_factors: int) -> float:
    """Largest lower bound L at which fully efficient designs still exist."""
    if k_factors < 2:
        raise OrbitDesignError(f"need K >= 2, got {k_factors}")
    return (k_factors - math.sqrt(_threshold_discriminant(k_factors))) / 2


def is_integer_threshold(k_factors: int) -> bool:
    """Exact predicate: threshold_b(K) is an integer (K = 2, 3, 6, 22, 27, ...)."""
    if k_factors < 2:
        raise OrbitDesignError(f"need K >= 2, got {k_factors}")
    disc = _threshold_discriminant(k_factors)
    root = math.isqrt(disc)
    return root * root == disc and (k_factors - root) % 2 == 0


def _central_orbit(k_factors: int) -> int:
    """Folded index of the central orbit: K/2 for even K, (K-1)/2 for odd."""
    return k_factors // 2 if k_factors % 2 == 0 else (k_factors - 1) // 2


def full_factorial(k_factors: int) -> OrbitDesign:
    """Uniform weight 2^-K per point, i.e. orbit weights C(K, k) / 2^K."""
    denom = 2**k_factors
    half = {
        k: Fraction(orbit_size(k_factors, k), denom)
        for k in range(_central_orbit(k_factors) + 1)
    }
    return OrbitDesign(k_factors, half, symmetric=True)


def lemma2_design(k_factors: int) -> OrbitDesign:
    """Identity-information design available exactly when B_K is an integer.

    Puts weight K/(2(3K-2)) on each orbit of the outermost symmetric pair
    (L = B_K) and the rest on the central orbit for even K; for odd K the
    outer weight is (K-1)/(2(3K-1)) and each of the two central orbits gets
    1/2 minus that.  Both second and fourth moments vanish exactly.
    """
    K = k_factors
    if not is_integer_threshold(K):
        raise OrbitDesignError(
            f"threshold_b({K}) = {threshold_b(K):.4f} is not an integer; "
            "no two/three-orbit identity design exists at the threshold"
        )
    lower = (K - math.isqrt(_threshold_discriminant(K))) // 2
    if K % 2 == 0:
        w_outer = Fraction(K, 2 * (3 * K - 2))
        weights = {lower: w_outer, K // 2: 1 - 2 * w_outer}
    else:
        w_outer = Fraction(K - 1, 2 * (3 * K - 1))
        weights = {lower: w_outer, (K - 1) // 2: Fraction(1, 2) - w_outer}
    design = OrbitDesign(K, weights, symmetric=True)
    _check_identity_moments(design)
    return design


def _check_identity_moments(design: OrbitDesign) -> None:
    m = design_moments(design)
    if not (m.m1 == 0 and m.m2 == 0 and m.m3 == 0 and m.m4 == 0):
        raise OrbitDesignError(f"construction failed to zero the moments: {m}")


@dataclass(frozen=True)
class WideDesignSpec:
    """A fully efficient design mixing the outermost, an intermediate, and the
    central symmetric orbits; alpha is the mixing proportion of the outer
    component and w_lower / w_ell the inner weights of the two components."""

    k_factors: int
    lower: int
    ell: Optional[int]
    alpha: Fraction
    w_lower: Optional[Fraction]
    w_ell: Optional[Fraction]
    design: OrbitDesign


def _default_ell(k_factors: int, disc: int) -> int:
    for ell in range(k_factors // 2 + 1):
        if (k_factors - 2 * ell) ** 2 <= disc:
            return ell
    raise OrbitDesignError(f"no admissible intermediate orbit for K={k_factors}")


def wide_design(k_factors: int, lower: int, ell: Optional[int] = None) -> WideDesignSpec:
    """Fully efficient design on [L, K-L] for L <= B_K.

    The intermediate orbit index ell may be chosen by the caller from the
    admissible range B_K <= ell <= (K - sqrt(K))/2; by default the smallest
    admissible integer is used.  Returns the full factorial for K <= 3.
    """
    K = k_factors
    if K < 2:
        raise OrbitDesignError(f"need K >= 2, got {K}")
    if lower < 0:
        raise OrbitDesignError(f"lower bound must be nonnegative, got {lower}")
    if K <= 3:
        if lower >= 1:
            raise EstimabilityError(
                f"for K={K} only the full factorial estimates all parameters; "
                f"no design on [{lower}, {K - lower}] can"
            )
        return WideDesignSpec(K, 0, None, Fraction(1), None, None, full_factorial(K))

    disc = _threshold_discriminant(K)
    t_low = K - 2 * lower
    if t_low * t_low < disc:
        raise WrongRegimeError(
            f"lower bound {lower} exceeds the threshold B_{K} = {threshold_b(K):.4f}; "
            "use narrow_design"
        )

    if ell is None:
        if t_low * t_low == disc:
            # lower sits exactly at the threshold: the two-orbit design suffices.
            return WideDesignSpec(
                K, lower, None, Fraction(1), _inner_weight(K, lower), None,
                lemma2_design(K),
            )
        ell = _default_ell(K, disc)
    t_ell = K - 2 * ell
    if ell <= lower:
        raise OrbitDesignError(f"ell must exceed the lower bound, got ell={ell} <= {lower}")
    if 2 * ell >= K or t_ell * t_ell > disc or t_ell * t_ell < K:
        raise OrbitDesignError(
            f"ell={ell} outside the admissible range "
            f"[{threshold_b(K):.4f}, {(K - math.sqrt(K)) / 2:.4f}]"
        )

    w_low = _inner_weight(K, lower)
    w_ell = _inner_weight(K, ell)
    numer = disc - t_ell * t_ell
    alpha = Fraction(numer, 4 * (ell - lower) * (K - lower - ell))
    if not 0 <= alpha <= 1:
        raise OrbitDesignError(f"mixing weight alpha={alpha} outside [0, 1]")

    center = _central_orbit(K)
    if K % 2 == 0:
        center_weight = alpha * (1 - 2 * w_low) + (1 - alpha) * (1 - 2 * w_ell)
    else:
        center_weight = alpha * (Fraction(1, 2) - w_low) + (1 - alpha) * (
            Fraction(1, 2) - w_ell
        )
    weights = {
        lower: alpha * w_low,
        ell: (1 - alpha) * w_ell,
        center: center_weight,
    }
    design = OrbitDesign(K, {k: w for k, w in weights.items() if w > 0}, symmetric=True)
    _check_identity_moments(design)
    return WideDesignSpec(K, lower, ell, alpha, w_low, w_ell, design)


def _inner_weight(k_factors: int, orbit: int) -> Fraction:
    """Outer-orbit weight making the second moment of a three-orbit component zero."""
    t = k_factors - 2 * orbit
    if k_factors % 2 == 0:
        return Fraction(k_factors, 2 * t * t)
    return Fraction(k_factors - 1, 2 * (t * t - 1))


@dataclass(frozen=True)
class NarrowDesignSpec:
    """Optimized two-symmetric-orbit design for narrow bounds."""

    k_factors: int
    lower: int
    w_star: float
    design: OrbitDesign
    log_det: float
    d_efficiency: float
    kw_report: KwReport


def _narrow_moment_lines(k_factors: int, lower: int) -> tuple[float, float, float, float]:
    """m2, m4 of the narrow family as affine functions of the outer weight w:
    m_j(w) = center_j + w * slope_j."""
    K = k_factors
    center = _central_orbit(K)
    m2_out = float(orbit_moment(K, lower, 2))
    m4_out = float(orbit_moment(K, lower, 4))
    m2_cen = float(orbit_moment(K, center, 2))
    m4_cen = float(orbit_moment(K, center, 4))
    return m2_cen, 2 * (m2_out - m2_cen), m4_cen, 2 * (m4_out - m4_cen)


def _narrow_objective(k_factors: int, lower: int):
    m2_0, m2_slope, m4_0, m4_slope = _narrow_moment_lines(k_factors, lower)

    def logdet(w: float) -> float:
        m = MomentSet(0.0, m2_0 + w * m2_slope, 0.0, m4_0 + w * m4_slope)
        return log_det_symmetric(k_factors, m)

    return logdet


def _narrow_derivatives(k_factors: int, lower: int, w: float) -> tuple[float, float]:
    """First and second derivative of the narrow-family log determinant at w.

    Every determinant factor is affine in w except the interaction block's
    all-ones eigenvalue, which picks up a -K(K-1) m2^2 / 2 term; with m2, m4
    affine in w the chain rule gives the sums below.
    """
    K = k_factors
    m2_0, m2_s, m4_0, m4_s = _narrow_moment_lines(K, lower)
    m2 = m2_0 + w * m2_s
    m4 = m4_0 + w * m4_s
    mult_i = K * (K - 3) // 2

    lam_one = 1 + 2 * (K - 2) * m2 + (K - 2) * (K - 3) * m4 / 2 - K * (K - 1) * m2 * m2 / 2
    d_lam_one = 2 * (K - 2) * m2_s + (K - 2) * (K - 3) * m4_s / 2 - K * (K - 1) * m2 * m2_s
    dd_lam_one = -K * (K - 1) * m2_s * m2_s

    factors = (
        (1 + (K - 1) * m2, (K - 1) * m2_s, 0.0, 1),
        (1 - m2, -m2_s, 0.0, K - 1),
        (lam_one, d_lam_one, dd_lam_one, 1),
        (1 + (K - 4) * m2 - (K - 3) * m4, (K - 4) * m2_s - (K - 3) * m4_s, 0.0, K - 1),
        (1 - 2 * m2 + m4, -2 * m2_s + m4_s, 0.0, mult_i),
    )
    first = 0.0
    second = 0.0
    for value, d1, d2, exponent in factors:
        first += exponent * d1 / value
        second += exponent * (d2 * value - d1 * d1) / (value * value)
    return first, second


def narrow_design(k_factors: int, lower: int) -> NarrowDesignSpec:
    """Optimal design on [L, K-L] for B_K < L < K/2.

    Weight w* on each of the two outermost orbits, remainder on the central
    orbit(s); w* found by bounded maximization of the log determinant over
    (0, 1/2) followed by Newton polishing of the stationarity condition.
    The returned design is certified by the equivalence-theorem check.
    """
    K = k_factors
    if K <= 3:
        raise EstimabilityError(
            f"for K={K} only the full factorial estimates all parameters"
        )
    center = _central_orbit(K)
    if (K % 2 == 0 and lower > K // 2) or (K % 2 == 1 and lower > (K - 1) // 2):
        raise OrbitDesignError(f"lower bound {lower} leaves an empty or invalid region")
    if lower == center:
        # Even K: L = K/2 leaves one orbit; odd K: L = (K-1)/2 leaves the two
        # central orbits, which form a single symmetric orbit.
        raise EstimabilityError(
            f"the region [{lower}, {K - lower}] holds a single symmetric orbit; "
            "the information matrix is always singular there"
        )
    disc = _threshold_discriminant(K)
    t_low = K - 2 * lower
    if t_low * t_low >= disc:
        raise WrongRegimeError(
            f"lower bound {lower} is at or below the threshold B_{K} = "
            f"{threshold_b(K):.4f}; use wide_design"
        )

    logdet = _narrow_objective(K, lower)
    result = minimize_scalar(
        lambda w: -logdet(w),
        bounds=(1e-12, 0.5 - 1e-12),
        method="bounded",
        options={"xatol": 1e-13, "maxiter": 500},
    )
    w = float(result.x)
    # Newton steps on d(logdet)/dw = 0; the bounded search already brackets
    # the optimum, polishing pushes the stationarity residual to roundoff.
    for _ in range(3):
        first, second = _narrow_derivatives(K, lower, w)
        if second >= 0:
            break
        step = first / second
        candidate = w - step
        if not 0 < candidate < 0.5:
            break
        w = candidate
        if abs(step) < 1e-16:
            break

    if K % 2 == 0:
        weights = {lower: w, center: 1 - 2 * w}
    else:
        weights = {lower: w, center: 0.5 - w}
    design = OrbitDesign(K, weights, symmetric=True)
    ld = logdet(w)
    eff = math.exp(ld / model_dims(K).p)
    report = kw_check(design, lower, K - lower)
    if not report.passed:
        raise OrbitDesignError(
            f"optimized design failed the equivalence check "
            f"(max violation {report.max_violation:.3g}); this indicates a bug"
        )
    return NarrowDesignSpec(K, lower, w, design, ld, eff, report)


def asymmetric_reduce(k_factors: int, lower: int, upper: int) -> OrbitDesign:
    """Optimal design for asymmetric wide bounds via the stricter side.

    With effective bound max(L, K-U) <= B_K the fully efficient design for
    the symmetric region [max(L, K-U), K - max(L, K-U)] is supported inside
    [L, U] and remains optimal there.  Narrower asymmetric bounds are out of
    scope.
    """
    K = k_factors
    if not 0 <= lower <= upper <= K:
        raise OrbitDesignError(f"invalid bounds [{lower}, {upper}] for K={K}")
    effective = max(lower, K - upper)
    if K > 3:
        t = K - 2 * effective
        if t * t < _threshold_discriminant(K):
            raise UnsupportedRegionError(
                f"asymmetric bounds [{lower}, {upper}] are narrower than the "
                f"threshold B_{K} = {threshold_b(K):.4f}; only wide asymmetric "
                "bounds are supported"
            )
    return wide_design(K, effective).design

"""Information matrices of invariant designs and their block structure.

The model is intercept + K main effects + all C(K,2) two-factor
interactions, p = 1 + K(K+1)/2 parameters.  For a permutation-invariant
design the p x p information matrix is determined by the four moments:
unit diagonal, first row (1, m1 .. m1, m2 .. m2), main-effect block
(1-m2) I + m2 J, main/interaction block (m1-m3) S^T + m3 11^T, and
interaction block (1-2m2+m4) I + (m2-m4) S S^T + m4 J, where S is the 0/1
incidence matrix of factors in interaction pairs.

When the odd moments vanish (sign-symmetric designs) the matrix becomes
block diagonal up to the intercept/interaction coupling, and determinant,
inverse and eigenvalues reduce to scalar formulas in m2, m4:

    lambda_one = 1 + 2(K-2) m2 + (K-2)(K-3) m4 / 2 - K(K-1) m2^2 / 2
    lambda_S   = 1 + (K-4) m2 - (K-3) m4          (multiplicity K-1)
    lambda_I   = 1 - 2 m2 + m4                    (multiplicity K(K-3)/2)
    det M      = (1+(K-1)m2) (1-m2)^(K-1) * lambda_one * lambda_S^(K-1)
                 * lambda_I^(K(K-3)/2)

All scalar formulas stay in exact rational arithmetic when the moments are
exact; floats enter only at the log/exp boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Union

import numpy as np

from .exceptions import OrbitDesignError, SingularDesignError
from .moments import MomentSet, design_moments
from .orbits import OrbitDesign

Numeric = Union[Fraction, float, int]

# A determinant factor this close to zero (relative to its size) counts as
# singular; exact-rational inputs produce exact zeros, so this only guards
# float-computed designs.
SINGULARITY_TOL = 1e-12


@dataclass(frozen=True)
class ModelDims:
    """Parameter counts of the interaction model for K factors."""

    k_factors: int
    p: int
    n_inter: int


def model_dims(k_factors: int) -> ModelDims:
    if k_factors < 2:
        raise OrbitDesignError(f"the interaction model needs K >= 2, got {k_factors}")
    n_inter = math.comb(k_factors, 2)
    return ModelDims(k_factors, 1 + k_factors + n_inter, n_inter)


def interaction_pairs(k_factors: int) -> list[tuple[int, int]]:
    """Interaction index order used everywhere: lexicographic pairs (0,1), (0,2), ..."""
    return list(combinations(range(k_factors), 2))


@dataclass(frozen=True)
class InfoMatrix:
    """Dense information matrix plus the moments it was assembled from."""

    dims: ModelDims
    dense: np.ndarray
    moments: MomentSet


@dataclass(frozen=True)
class BlockEigenvalues:
    """Eigenvalues of the interaction block (after removing the intercept coupling)
    together with the two factors of det(M11)."""

    lambda_one: Numeric
    lambda_S: Numeric
    lambda_I: Numeric
    mult_one: int
    mult_S: int
    mult_I: int
    det_m11_factor_big: Numeric
    det_m11_factor_small: Numeric


@dataclass(frozen=True)
class InverseCoefficients:
    """Scalars defining the inverse information matrix in the symmetric case.

    The inverse keeps the chess-board shape: intercept entry c0, intercept
    to interaction entries -c2, main-effect block with two distinct entries,
    and interaction block (I - delta_S S S^T - delta_J J) / lambda_I.
    """

    c0: Numeric
    c2: Numeric
    delta_S: Numeric
    delta_J: Numeric
    m11_inv_diag: Numeric
    m11_inv_offdiag: Numeric


@dataclass(frozen=True)
class RegularityReport:
    """Outcome of the nonsingularity test for a symmetric invariant design."""

    regular: bool
    failing: tuple[str, ...]
    symmetric_support: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.regular

    def message(self) -> str:
        if self.regular:
            return "design is regular (all parameters estimable)"
        return (
            f"singular design: block(s) {', '.join(self.failing)} vanish for "
            f"symmetric support {self.symmetric_support}"
        )


def build_s_matrix(k_factors: int) -> np.ndarray:
    """0/1 incidence matrix, one row per interaction pair, ones at its two factors.

    Satisfies S 1 = 2*1, S^T 1 = (K-1) 1 and S^T S = (K-2) I + J.
    """
    dims = model_dims(k_factors)
    s = np.zeros((dims.n_inter, k_factors), dtype=np.int64)
    for row, (a, b) in enumerate(interaction_pairs(k_factors)):
        s[row, a] = 1
        s[row, b] = 1
    return s


def assemble_general(k_factors: int, m: MomentSet, *, exact: bool = False) -> InfoMatrix:
    """Dense p x p information matrix from the four moments.

    Handles asymmetric designs (m1, m3 nonzero).  With exact=True the matrix
    has object dtype holding exact rationals, suitable for identity checks;
    otherwise float64.
    """
    dims = model_dims(k_factors)
    K, p, n_inter = dims.k_factors, dims.p, dims.n_inter
    pairs = interaction_pairs(K)

    if exact:
        m1, m2, m3, m4 = (Fraction(v) for v in (m.m1, m.m2, m.m3, m.m4))
        dense = np.empty((p, p), dtype=object)
    else:
        m1, m2, m3, m4 = (float(v) for v in (m.m1, m.m2, m.m3, m.m4))
        dense = np.empty((p, p), dtype=np.float64)

    one = Fraction(1) if exact else 1.0
    dense[0, 0] = one
    dense[0, 1 : K + 1] = m1
    dense[1 : K + 1, 0] = m1
    dense[0, K + 1 :] = m2
    dense[K + 1 :, 0] = m2

    # Main-effect block: (1 - m2) I + m2 J.
    for i in range(K):
        for j in range(K):
            dense[1 + i, 1 + j] = one if i == j else m2

    # Main effect vs interaction: m1 when the factor is in the pair, m3 otherwise.
    for col, (a, b) in enumerate(pairs):
        for i in range(K):
            value = m1 if i in (a, b) else m3
            dense[1 + i, K + 1 + col] = value
            dense[K + 1 + col, 1 + i] = value

    # Interaction block: 1 on the diagonal, m2 for pairs sharing a factor, m4 otherwise.
    for r in range(n_inter):
        a, b = pairs[r]
        for c in range(r, n_inter):
            if r == c:
                value = one
            else:
                x, y = pairs[c]
                shared = len({a, b} & {x, y})
                value = m2 if shared == 1 else m4
            dense[K + 1 + r, K + 1 + c] = value
            dense[K + 1 + c, K + 1 + r] = value

    return InfoMatrix(dims, dense, m)


def _require_symmetric(m: MomentSet) -> None:
    if not m.is_symmetric():
        raise OrbitDesignError(
            "odd moments are nonzero; the block formulas hold only for "
            "sign-symmetric designs"
        )


def block_eigenvalues(k_factors: int, m: MomentSet) -> BlockEigenvalues:
    """Scalar eigenvalues of the reduced interaction block for symmetric moments."""
    _require_symmetric(m)
    K = k_factors
    m2, m4 = m.m2, m.m4
    dims = model_dims(K)
    lambda_one = (
        1
        + 2 * (K - 2) * m2
        + (K - 2) * (K - 3) * m4 / 2
        - K * (K - 1) * m2 * m2 / 2
    )
    lambda_s = 1 + (K - 4) * m2 - (K - 3) * m4
    lambda_i = 1 - 2 * m2 + m4
    return BlockEigenvalues(
        lambda_one=lambda_one,
        lambda_S=lambda_s,
        lambda_I=lambda_i,
        mult_one=1,
        mult_S=K - 1,
        mult_I=dims.n_inter - K,
        det_m11_factor_big=1 + (K - 1) * m2,
        det_m11_factor_small=1 - m2,
    )


def _is_nonpositive(value: Numeric) -> bool:
    return value <= SINGULARITY_TOL * (1 + abs(value))


def _det_factors(k_factors: int, m: MomentSet) -> list[tuple[str, Numeric, int]]:
    ev = block_eigenvalues(k_factors, m)
    factors = [
        ("M11", ev.det_m11_factor_big, 1),
        ("M11", ev.det_m11_factor_small, k_factors - 1),
        ("lambda_one", ev.lambda_one, ev.mult_one),
    ]
    if k_factors == 2:
        # lambda_S and lambda_I coincide and their exponents (1 and -1)
        # cancel; the single interaction contributes through lambda_one only.
        return factors
    factors.append(("lambda_S", ev.lambda_S, ev.mult_S))
    if ev.mult_I > 0:
        factors.append(("lambda_I", ev.lambda_I, ev.mult_I))
    return factors


def log_det_symmetric(k_factors: int, m: MomentSet) -> float:
    """log det of the information matrix; -inf (not an exception) when singular."""
    total = 0.0
    for _, value, exponent in _det_factors(k_factors, m):
        if _is_nonpositive(value):
            return -math.inf
        total += exponent * math.log(float(value))
    return total


def regularity(design: OrbitDesign, k_factors: int | None = None) -> RegularityReport:
    """Nonsingularity classification of a symmetric invariant design.

    The matrix is nonsingular exactly when the design touches at least two
    distinct symmetric orbits and, for K >= 4, some supported orbit is
    strictly between the extremes (0 < k < K/2, keeps lambda_S positive) and
    some supported orbit has k > 1 (keeps lambda_I positive).
    """
    if not design.symmetric:
        raise OrbitDesignError("regularity classification applies to symmetric designs")
    K = design.k_factors if k_factors is None else k_factors
    if K != design.k_factors:
        raise OrbitDesignError(f"design has K={design.k_factors}, expected {K}")
    support = design.symmetric_support()
    failing: list[str] = []
    if len(support) < 2:
        failing += ["lambda_one", "M11"]
    if K > 3:
        if not any(0 < k < K / 2 for k in support):
            failing.append("lambda_S")
        if not any(k > 1 for k in support):
            failing.append("lambda_I")
    return RegularityReport(not failing, tuple(failing), support)


def inverse_coefficients(k_factors: int, m: MomentSet) -> InverseCoefficients:
    """Scalars of the structured inverse; raises SingularDesignError when det <= 0."""
    _require_symmetric(m)
    K = k_factors
    for name, value, _ in _det_factors(K, m):
        if _is_nonpositive(value):
            raise SingularDesignError(
                f"information matrix is singular ({name} = {float(value):.3g})"
            )
    m2, m4 = m.m2, m.m4
    # Denominator of c2 is twice lambda_one; delta_J divides by twice the
    # interaction block's all-ones eigenvalue (no m2^2 term).
    c2_den = 2 + 4 * (K - 2) * m2 + (K - 2) * (K - 3) * m4 - K * (K - 1) * m2 * m2
    c2 = 2 * m2 / c2_den
    c0 = 1 + c2 * math.comb(K, 2) * m2
    lambda_s = 1 + (K - 4) * m2 - (K - 3) * m4
    lambda_i = 1 - 2 * m2 + m4
    delta_s = (m2 - m4) / lambda_s
    delta_j_den = 2 + 4 * (K - 2) * m2 + (K - 2) * (K - 3) * m4
    delta_j = (
        2 * m4 - 4 * delta_s * ((K - 3) * m4 + 2 * m2) - 2 * c2 * m2 * lambda_i
    ) / delta_j_den
    m11_den = (1 - m2) * (1 + (K - 1) * m2)
    return InverseCoefficients(
        c0=c0,
        c2=c2,
        delta_S=delta_s,
        delta_J=delta_j,
        m11_inv_diag=(1 + (K - 2) * m2) / m11_den,
        m11_inv_offdiag=-m2 / m11_den,
    )


def assemble_inverse(k_factors: int, m: MomentSet) -> np.ndarray:
    """Dense float inverse of the information matrix (symmetric case)."""
    coeffs = inverse_coefficients(k_factors, m)
    dims = model_dims(k_factors)
    K, p, n_inter = dims.k_factors, dims.p, dims.n_inter
    inv = np.zeros((p, p))
    inv[0, 0] = float(coeffs.c0)
    inv[0, K + 1 :] = -float(coeffs.c2)
    inv[K + 1 :, 0] = -float(coeffs.c2)
    main = np.full((K, K), float(coeffs.m11_inv_offdiag))
    np.fill_diagonal(main, float(coeffs.m11_inv_diag))
    inv[1 : K + 1, 1 : K + 1] = main
    s = build_s_matrix(K).astype(np.float64)
    lambda_i = float(1 - 2 * m.m2 + m.m4)
    block = (
        np.eye(n_inter)
        - float(coeffs.delta_S) * (s @ s.T)
        - float(coeffs.delta_J) * np.ones((n_inter, n_inter))
    ) / lambda_i
    inv[K + 1 :, K + 1 :] = block
    return inv


def info_matrix_of(design: OrbitDesign, *, exact: bool = False) -> InfoMatrix:
    """Convenience: moments then dense assembly for an invariant design."""
    return assemble_general(design.k_factors, design_moments(design), exact=exact)

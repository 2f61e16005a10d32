"""D-optimal approximate designs for two-level interaction models on
hypercube regions where the number of active factors is bounded from both
sides.

The library constructs fully efficient designs for wide bounds, optimizes
the outer-orbit weight for narrow bounds, and certifies optimality through
the equivalence theorem.  See the command line front end in
``orbitdesign.cli`` for the packaged workflows.
"""

from .exceptions import (
    EstimabilityError,
    OrbitDesignError,
    SingularDesignError,
    UnsupportedRegionError,
    WrongRegimeError,
)
from .orbits import (
    DesignPoint,
    OrbitDesign,
    Region,
    active_count,
    enumerate_orbit,
    orbit_size,
    point_weight,
)
from .moments import MomentSet, design_moments, orbit_moment, orbit_moment_sum
from .info_matrix import (
    BlockEigenvalues,
    InfoMatrix,
    InverseCoefficients,
    ModelDims,
    RegularityReport,
    assemble_general,
    assemble_inverse,
    block_eigenvalues,
    build_s_matrix,
    info_matrix_of,
    inverse_coefficients,
    log_det_symmetric,
    model_dims,
    regularity,
)
from .construct import (
    NarrowDesignSpec,
    WideDesignSpec,
    asymmetric_reduce,
    full_factorial,
    is_integer_threshold,
    lemma2_design,
    narrow_design,
    threshold_b,
    wide_design,
)
from .verify import (
    KwReport,
    SensitivityPoly,
    brute_force_info,
    d_efficiency,
    kw_check,
    sensitivity_poly,
)

__all__ = [
    "BlockEigenvalues",
    "DesignPoint",
    "EstimabilityError",
    "InfoMatrix",
    "InverseCoefficients",
    "KwReport",
    "ModelDims",
    "MomentSet",
    "NarrowDesignSpec",
    "OrbitDesign",
    "OrbitDesignError",
    "Region",
    "RegularityReport",
    "SensitivityPoly",
    "SingularDesignError",
    "UnsupportedRegionError",
    "WideDesignSpec",
    "WrongRegimeError",
    "active_count",
    "assemble_general",
    "assemble_inverse",
    "asymmetric_reduce",
    "block_eigenvalues",
    "brute_force_info",
    "build_s_matrix",
    "d_efficiency",
    "design_moments",
    "enumerate_orbit",
    "full_factorial",
    "info_matrix_of",
    "inverse_coefficients",
    "is_integer_threshold",
    "kw_check",
    "lemma2_design",
    "log_det_symmetric",
    "model_dims",
    "narrow_design",
    "orbit_moment",
    "orbit_moment_sum",
    "orbit_size",
    "point_weight",
    "regularity",
    "sensitivity_poly",
    "threshold_b",
    "wide_design",
]

__version__ = "0.1.0"

"""Exception types shared across the package."""


class OrbitDesignError(ValueError):
    """Base class for domain errors raised by this package."""


class SingularDesignError(OrbitDesignError):
    """The design's information matrix is singular (some parameters not estimable)."""


class EstimabilityError(SingularDesignError):
    """No design on the requested region can estimate all model parameters."""


class WrongRegimeError(OrbitDesignError):
    """The requested constructor does not apply to this (K, L); use the other regime."""


class UnsupportedRegionError(OrbitDesignError):
    """The region is outside the scope of the implemented constructions."""

"""Exception types shared across the package."""


class LabError(Exception):
    """Base class for numerical-contract failures."""


class GridTooNarrowError(LabError):
    """Mass deficit before renormalization exceeded the allowed budget."""


class AliasingError(LabError):
    """Density has not decayed at the grid boundary; widen the grid."""


class TailDominanceError(LabError):
    """Integrand is still significant at the grid boundary."""


class SeriesError(LabError):
    """A series did not pass its convergence / stabilization gate."""


class OscillationError(LabError):
    """Finite-difference derivative estimates disagree; data too rough."""


class ConstraintError(LabError):
    """Model parameters violate a structural constraint."""

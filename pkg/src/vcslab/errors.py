"""Exception types shared across the library.

Every precondition failure raises a dedicated class so callers (and the
experiment runner) can distinguish bad input from a failed numerical check.
"""


class VcsLabError(ValueError):
    """Base class for all vcslab argument / precondition errors."""


class NonMonotoneError(VcsLabError):
    """Eigenvalue sequence is not strictly increasing."""


class NegativeGroundError(VcsLabError):
    """Lowest eigenvalue of a sequence is negative."""


class LengthMismatchError(VcsLabError):
    """Per-sector inputs do not share a common truncation size."""


class RegimeError(VcsLabError):
    """Input sequence belongs to the wrong ground-level regime (zero vs positive)."""


class BadDeformationError(VcsLabError):
    """Deformation parameter q outside the admissible interval (0, 1]."""


class NonPositiveDerivativeError(VcsLabError):
    """Superpotential derivative is not strictly positive on the grid."""


class NotHermitianError(VcsLabError):
    """Operator expected to be Hermitian is not, beyond tolerance."""


class OutOfDiscError(VcsLabError):
    """Intensity J lies outside the convergence disc of the coefficient series."""


class TailTooLargeError(VcsLabError):
    """Truncation tail bound exceeds the acceptance threshold."""


class SpectraNotDisjointError(VcsLabError):
    """Two spectra collide within tolerance where disjointness is required."""


class DimensionMismatchError(VcsLabError):
    """Operands live on different truncated spaces."""


class UnverifiableWeightError(VcsLabError):
    """Tabulated moment weight cannot be verified (insufficient support coverage)."""


class NonPositiveDeltaError(VcsLabError):
    """Resolution check of the delta family called with delta <= 0."""


class HypothesisViolatedError(VcsLabError):
    """Commutant or invertibility hypothesis of the companion construction fails."""


class ClosedFormMismatchError(VcsLabError):
    """Numerically assembled operator deviates from its closed form."""


class ConfigError(VcsLabError):
    """Experiment configuration failed to parse or validate."""

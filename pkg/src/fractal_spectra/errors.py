"""Exception hierarchy.

Validation errors cover malformed inputs and broken preconditions; numerical
errors cover runs that started from valid inputs but could not finish.  The
CLI maps the two branches to distinct exit codes.
"""


class FractalSpectraError(Exception):
    """Base class for all package errors."""


class ValidationError(FractalSpectraError):
    """Invalid input data or violated precondition."""

    exit_code = 2


class NumericalError(FractalSpectraError):
    """A numerically degenerate or non-convergent computation."""

    exit_code = 3


# --- self-similar weight parameters -------------------------------------

class LengthMismatch(ValidationError):
    """Parameter vectors have inconsistent lengths or too few pieces."""


class NonPositiveScale(ValidationError):
    """Some subinterval width a_k is not strictly positive."""


class ScaleSumMismatch(ValidationError):
    """The widths a_k do not sum to 1."""


class ContractionViolation(ValidationError):
    """sum(a_k * d_k^2) >= 1, the refinement operator does not contract."""


class FixedPointSingular(ValidationError):
    """A boundary multiplier equals 1, boundary value equation is singular."""


class NoSpectralOrder(ValidationError):
    """The order equation sum (a_k |d_k|)^{D/2} = 1 has no positive root."""


class BudgetExceeded(ValidationError):
    """Requested refinement depth exceeds the cell budget."""


# --- renewal systems -----------------------------------------------------

class CoefficientInvariantViolation(ValidationError):
    """Renewal coefficients break sign, mass or lag-structure invariants."""


class NonDegenerateParity(CoefficientInvariantViolation):
    """Integer-lag coefficients violate the even/odd lag split."""


class ForcingOnNegativeAxis(ValidationError):
    """A one-sided solver received forcing supported on t < 0."""


class SeriesDivergence(ValidationError):
    """The periodization series cannot be certified to converge."""


class UnstableStep(ValidationError):
    """Grid step too coarse relative to the smallest delay."""


class EnvelopeTooWide(ValidationError):
    """Forcing tail mass beyond the left horizon exceeds tolerance."""


# --- spectral / asymptotics ----------------------------------------------

class RayExhausted(NumericalError):
    """Fewer pencil eigenvalues on the requested ray than asked for."""


class NonConvergence(NumericalError):
    """Iteration did not reach the requested tolerance."""


class WindowTooNarrow(ValidationError):
    """The lambda window does not cover enough periods or samples."""

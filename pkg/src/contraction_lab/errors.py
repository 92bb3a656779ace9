"""Exception types shared across the library."""


class ContractionLabError(Exception):
    """Base class for all library-specific errors."""


class NonFiniteError(ContractionLabError):
    """An array contains NaN or Inf where finite values are required."""


class NonSymmetricError(ContractionLabError):
    """A matrix exceeds the symmetry tolerance where symmetry is required."""


class DimensionMismatchError(ContractionLabError):
    """Operands have incompatible dimensions."""


class StepSizeUnderflowError(ContractionLabError):
    """The adaptive step size fell below the resolvable fraction of the span."""


class NoRootFoundError(ContractionLabError):
    """No qualifying root exists in the searched interval."""


class ZeroFieldError(ContractionLabError):
    """The vector field vanishes where a nonzero value is required.

    Carries the offending sample as attributes when raised from a sweep.
    """

    def __init__(self, message, x=None, i=None, j=None):
        super().__init__(message)
        self.x = x
        self.i = i
        self.j = j


class MetricAppearsConstantError(ContractionLabError):
    """All sampled metric gradients are numerically zero."""


class ApproximationNotConvergingError(ContractionLabError):
    """Piecewise-constant approximants failed the Cauchy criterion."""

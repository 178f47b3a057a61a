"""Exception types shared across the package.

``ValidationError`` covers rejected inputs (CLI exit code 1);
``NumericalError`` covers computations that failed or lost too much
precision (CLI exit code 2).
"""


class W2AssimError(Exception):
    """Base class for all package errors."""


class ValidationError(W2AssimError):
    """Input violates a documented precondition or invariant."""


class NumericalError(W2AssimError):
    """A numerical routine failed or exceeded its error budget."""


class NonFinite(ValidationError):
    """NaN or infinity where finite values are required."""


class NotSymmetric(ValidationError):
    """Matrix asymmetry exceeds the symmetry tolerance band."""


class NotPsd(ValidationError):
    """Eigenvalue below the positive-semidefinite tolerance band."""


class DimMismatch(ValidationError):
    """Operands have inconsistent dimensions."""


class TooFewSamples(ValidationError):
    """Not enough samples for the requested statistic."""


class TooLarge(ValidationError):
    """Problem size exceeds the supported desk-scale bound."""


class EigenFailure(NumericalError):
    """Symmetric eigendecomposition did not converge."""


class NegativeRadicand(NumericalError):
    """A squared distance came out negative beyond the clamping band."""


class SingularInnovation(NumericalError):
    """Innovation covariance is numerically singular."""


class DidNotConverge(NumericalError):
    """Iterative optimizer hit its iteration cap before the tolerance."""

"""Exception types shared across the package."""


class AnosovDomainsError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(AnosovDomainsError, ValueError):
    """Input fails a precondition (bad presentation, character, representation...)."""


class ResourceLimitError(AnosovDomainsError):
    """A configured size guard was exceeded."""


class SingularMatrixError(AnosovDomainsError, ValueError):
    """Matrix is (numerically) singular where an invertible one is required."""


class EigenSolverError(AnosovDomainsError, ArithmeticError):
    """The eigensolver failed to converge or produced non-finite output."""


class NumericalAmbiguityError(AnosovDomainsError):
    """A numerical identification could not be confirmed combinatorially."""

"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Input violates a structural invariant (Hermiticity, spectrum, shape)."""


class DomainError(ValueError):
    """A scalar function was asked for a value outside its domain."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, estimate=None, error_estimate=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class SingularCaseError(ValueError):
    """Derivative requested where B has a boundary eigenvalue that Q does not respect."""


class ConsistencyError(RuntimeError):
    """An internal identity that must hold (e.g. a positive integrand) was violated."""

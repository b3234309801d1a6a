"""Exception hierarchy shared by all modules."""


class QuasiposError(Exception):
    """Base class for library errors."""


class DomainError(QuasiposError, ValueError):
    """Argument outside the momentum domain or the range of rho."""


class NumericalError(QuasiposError, ArithmeticError):
    """Quadrature, root finding or a fixed-point loop did not converge."""

    def __init__(self, message, residual=None, trace=None):
        super().__init__(message)
        self.residual = residual
        self.trace = trace


class NoMinimumError(QuasiposError):
    """The model has no positive minimal position uncertainty."""


class ConfigurationError(QuasiposError, ValueError):
    """Invalid or unsupported combination of options."""


class ConventionError(QuasiposError, TypeError):
    """Wave functions with mismatched representation or convention tags."""


class TruncationWarning(UserWarning):
    """A grid or window is too small to capture the requested accuracy."""


class RegimeWarning(UserWarning):
    """Deformation parameter too large for a first-order treatment."""


class ResolutionError(NumericalError):
    """A grid is too coarse for a derivative to converge."""

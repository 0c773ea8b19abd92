"""Exception hierarchy shared across the package."""


class ChuaSyncError(Exception):
    """Base class for all package errors."""


class ValidationError(ChuaSyncError, ValueError):
    """Invalid parameters or inputs."""


class NonPositiveDecayRate(ValidationError):
    pass


class IndexOutOfRange(ChuaSyncError, IndexError):
    pass


class TooFewNodes(ValidationError):
    pass


class NonPositiveGain(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class DimensionTooLarge(ValidationError):
    pass


class NonFiniteInput(ValidationError):
    pass


class EigensolverFailure(ChuaSyncError, ArithmeticError):
    pass


class NonFiniteState(ChuaSyncError, ArithmeticError):
    """Raised when an integrated state leaves the divergence guard."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DegenerateWindow(ChuaSyncError, ValueError):
    pass


class ConfigParseError(ChuaSyncError, ValueError):
    pass

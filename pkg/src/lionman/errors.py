"""Exception hierarchy shared by every lionman module."""


class LionManError(Exception):
    """Base class for all errors raised by the package."""


class InvalidInputError(LionManError, ValueError):
    pass


class DegenerateGeodesicError(LionManError):
    """Raised for point pairs joined by more than one geodesic (antipodes)."""


class DomainTooLargeError(LionManError, ValueError):
    pass


class InvalidStateError(LionManError):
    pass


class NumericFailureError(LionManError, ArithmeticError):
    pass


class HypothesisViolationError(LionManError):
    """A theorem hypothesis failed on a sampled input."""


class StrategyExhaustedError(LionManError):
    pass


class InsufficientDataError(LionManError):
    pass


class SamplerStarvationWarning(UserWarning):
    """Fewer than 1% of drawn configurations met a check's premises."""

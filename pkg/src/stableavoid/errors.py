"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ToleranceError(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""


class ResourceLimitError(RuntimeError):
    """A simulation exceeded its configured step or event budget."""


class DegenerateConditioningError(RuntimeError):
    """No replicate satisfied the conditioning event."""


class PoolExhaustedError(RuntimeError):
    """Weighted path resampling ran out of regeneration attempts."""

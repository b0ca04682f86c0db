"""Exception types shared across the package."""


class SpinTestError(Exception):
    """Base class for all package errors."""


class InvalidCut(SpinTestError, ValueError):
    pass


class TooLarge(SpinTestError, ValueError):
    """Requested enumeration or dense solve exceeds the configured limit."""


class EmptyPortSet(SpinTestError, ValueError):
    pass


class InvalidPartition(SpinTestError, ValueError):
    pass


class InvalidParams(SpinTestError, ValueError):
    pass


class NotRegular(SpinTestError, ValueError):
    pass


class LayoutMismatch(SpinTestError, ValueError):
    pass


class MismatchedSupport(SpinTestError, ValueError):
    pass


class ConditionViolation(SpinTestError, ValueError):
    """Instance parameters violate one of the construction conditions."""


class PortExhaustion(SpinTestError, ValueError):
    pass


class Infeasible(SpinTestError, ValueError):
    pass


class NotFerromagnetic(SpinTestError, ValueError):
    pass


class EmptySamples(SpinTestError, ValueError):
    pass


class InsufficientSamples(SpinTestError, ValueError):
    pass


class BudgetExceeded(SpinTestError, RuntimeError):
    pass


class NoProperColoring(SpinTestError, ValueError):
    pass


class ImproperColoring(SpinTestError, ValueError):
    pass


class NotBipartite(SpinTestError, ValueError):
    pass


class NotConnected(SpinTestError, ValueError):
    pass


class InvalidMode(SpinTestError, ValueError):
    pass


class NonFerromagneticWarning(UserWarning):
    """Glauber dynamics was run on a model with a negative coupling."""

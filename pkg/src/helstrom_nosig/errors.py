"""Exception hierarchy shared by every module of the package."""


class HelstromLabError(Exception):
    """Base class for all numerical and domain errors raised by the package."""


class ZeroVector(HelstromLabError, ValueError):
    pass


class NotPure(HelstromLabError, ValueError):
    pass


class BadDistribution(HelstromLabError, ValueError):
    pass


class OutOfDomain(HelstromLabError, ValueError):
    pass


class InvalidDetector(HelstromLabError, ValueError):
    pass


class InvalidState(HelstromLabError, ValueError):
    pass


class UnknownLabel(HelstromLabError, KeyError):
    pass


class SingularSystem(HelstromLabError, ArithmeticError):
    pass


class InsufficientData(HelstromLabError, ValueError):
    pass


class IoFailure(HelstromLabError, OSError):
    pass


class DegenerateBranch(UserWarning):
    """Emitted when a steering branch has (numerically) zero weight."""

"""Exception hierarchy. Every domain failure derives from CospectraError."""


class CospectraError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class InvalidKey(CospectraError, KeyError):
    pass


class InvalidParameter(CospectraError, ValueError):
    pass


class SizeLimitExceeded(CospectraError):
    pass


class DimensionMismatch(CospectraError, ValueError):
    pass


class NotATree(CospectraError):
    pass


class NonPeriodic(CospectraError):
    pass


class SchreierUnsupported(CospectraError):
    pass


class FiniteInput(CospectraError):
    pass


class ToleranceFailure(CospectraError):
    """Internal numerical failure; should not happen on valid input."""


class RepresentationMismatch(CospectraError, TypeError):
    pass


class NotCataloged(CospectraError):
    pass


class InvalidWord(CospectraError, ValueError):
    pass

"""Exception hierarchy shared by all billiardlab modules."""


class BilliardLabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(BilliardLabError, ValueError):
    """An argument violates a documented precondition."""


class NotFoundError(BilliardLabError, KeyError):
    """A requested label or entry does not exist."""


class DataError(BilliardLabError):
    """An input file or data stream cannot be parsed."""


class NumericalError(BilliardLabError):
    """A numerical procedure failed to produce a usable result."""


class QualityWarning(UserWarning):
    """A statistical quality check failed; results may be degraded."""

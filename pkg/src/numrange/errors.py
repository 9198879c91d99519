"""Exception hierarchy shared by every numrange module."""

from __future__ import annotations


class NumRangeError(Exception):
    """Base class for all errors raised by numrange."""


class DimensionMismatch(NumRangeError, ValueError):
    pass


class SingularPoint(NumRangeError, ArithmeticError):
    pass


class ParseError(NumRangeError, ValueError):
    pass


class ValidationError(NumRangeError, ValueError):
    """Invalid map document; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DomainError(NumRangeError, ValueError):
    pass


class InfiniteInput(NumRangeError, ValueError):
    """A bound was asked for with a numerical-range sup flagged as infinite."""


class PreconditionError(NumRangeError, ValueError):
    pass


class NoConvergence(NumRangeError, RuntimeError):
    pass


class JacobianSingular(NumRangeError, ArithmeticError):
    pass


class NoRoot(NumRangeError, ValueError):
    pass


class ConditionFailed(NumRangeError, ValueError):
    pass

"""Exception types shared across the package."""

from __future__ import annotations


class QsimError(Exception):
    """Base class for package-specific errors."""


class TooManyQubits(QsimError):
    """Dense simulation requested beyond the supported qubit count."""


class DegenerateNorm(QsimError):
    """A measurement tried to collapse onto a branch of vanishing weight."""


class NonClifford(QsimError):
    """An op outside the stabilizer backend's gate set was submitted to it."""

    def __init__(self, message: str, op_index: int | None = None):
        super().__init__(message)
        self.op_index = op_index


class TooManyStrategies(QsimError):
    """A strategy enumeration would exceed the safety cap."""


class UnknownProfile(QsimError):
    """A correlation table was queried at a setting profile it does not hold."""


class ParseError(QsimError):
    """Problem in circuit text. Carries the 1-based source line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MalformedHeader(ParseError):
    pass


class UnknownGate(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class IndexOutOfRange(ParseError):
    pass


class UndefinedConditionBit(ParseError):
    pass

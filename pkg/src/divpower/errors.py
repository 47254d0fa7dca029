"""Exception hierarchy shared by every module."""


class DivPowerError(Exception):
    """Base class for library errors."""


class DivisionByZero(DivPowerError, ZeroDivisionError):
    pass


class FieldMismatch(DivPowerError):
    pass


class DimensionMismatch(DivPowerError):
    pass


class NoSolution(DivPowerError):
    pass


class InvalidArgs(DivPowerError, ValueError):
    pass


class BadSplit(InvalidArgs):
    pass


class ShapeMismatch(InvalidArgs):
    pass


class TooLarge(DivPowerError):
    pass


class ArityTooLarge(TooLarge):
    pass


class DegreeOverflow(DivPowerError):
    pass


class UnsupportedPresentation(DivPowerError):
    pass


class UnsupportedSymbol(DivPowerError):
    pass


class UnsupportedField(DivPowerError):
    """Raised by operations only implemented over prime fields."""


class BadCharacteristic(DivPowerError):
    pass


class TruncationTooSmall(DivPowerError):
    pass


class TruncationMismatch(DivPowerError):
    pass


class NotSquareZero(DivPowerError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotSplit(DivPowerError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class AxiomViolation(DivPowerError):
    """A constructed object failed its axiom checker."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class WellDefinednessFailure(DivPowerError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(DivPowerError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(DivPowerError):
    pass


class TaskError(DivPowerError):
    pass

"""Exception types raised across the package."""


class NestFnError(Exception):
    """Base class for all package errors."""


class InvalidParameters(NestFnError, ValueError):
    pass


class DomainError(NestFnError, ValueError):
    """An input bundle outside the positive orthant."""


class NonPositiveBracket(NestFnError, ArithmeticError):
    """The outer bracket (or the inner aggregate) is not positive, so V is undefined.

    ``row`` is set when the failure comes from a panel evaluation.
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NumericalBreakdown(NestFnError, ArithmeticError):
    pass


class FormMismatch(NestFnError, ValueError):
    pass


class ZeroMarginalProduct(NestFnError, ArithmeticError):
    pass


class FormulaDomainError(NestFnError, ArithmeticError):
    pass


class ScanBudgetExceeded(NestFnError, ValueError):
    pass


class TooFewObservations(NestFnError, ValueError):
    pass


class AllStartsFailed(NestFnError, RuntimeError):
    pass


class UnsatisfiableRegion(NestFnError, RuntimeError):
    pass


class PanelFormatError(NestFnError, ValueError):
    pass


class HeaderMismatch(PanelFormatError):
    pass


class RowParseError(PanelFormatError):
    def __init__(self, line, column, message=None):
        super().__init__(message or f"cannot parse column {column!r} on line {line}")
        self.line = line
        self.column = column


class NonPositiveValue(PanelFormatError):
    def __init__(self, line, column):
        super().__init__(f"non-positive {column} on line {line}")
        self.line = line
        self.column = column

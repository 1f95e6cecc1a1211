"""Exception hierarchy shared across the toolkit."""


class StreamSalesError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(StreamSalesError):
    """Column set or variable metadata does not match the schema."""


class ParseError(StreamSalesError):
    """A cell could not be parsed; carries row/column context."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyInputError(StreamSalesError):
    """Input file or table contains no data rows."""


class ValidationError(StreamSalesError):
    """Strict validation found out-of-bounds or non-finite values."""


class DomainError(StreamSalesError):
    """A value is outside the mathematical domain of an operation."""


class ArgumentError(StreamSalesError):
    """An argument violates an operation precondition."""


class CalibrationError(StreamSalesError):
    """Synthetic generator targets are infeasible."""


class ConvergenceError(StreamSalesError):
    """An iterative solver stopped before reaching tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DegenerateError(StreamSalesError):
    """Inputs are too small or too uniform for the requested operation."""


class PlanError(StreamSalesError):
    """A fold plan does not cover the dataset it is applied to."""


class SearchError(StreamSalesError):
    """Every configuration in a grid search failed."""


class CapabilityError(StreamSalesError):
    """The requested exact method is infeasible at this problem size."""


class InsufficientDataError(StreamSalesError):
    """Not enough points to run the requested analysis."""

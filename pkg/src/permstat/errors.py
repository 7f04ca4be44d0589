"""Exception types shared across the package."""

from __future__ import annotations


class PermstatError(Exception):
    """Base class for all permstat errors."""


class DataValidationError(PermstatError):
    """Invalid numeric input or parameter (non-finite data, bad bandwidth, ...)."""


class DimensionMismatchError(PermstatError):
    """Matrix or dataset shapes are mutually inconsistent."""


class DegenerateVarianceError(PermstatError):
    """A studentized statistic has a zero variance estimate (constant data)."""


class CsvFormatError(PermstatError):
    """Malformed CSV content; carries file/row/column context when known."""

    def __init__(self, message: str, path=None, row: int | None = None,
                 column: int | None = None):
        self.path = path
        self.row = row
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class ConfigError(PermstatError):
    """Invalid experiment configuration; names the offending field."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field is not None:
            message = f"field '{field}': {message}"
        super().__init__(message)

"""Exception and warning types raised across the package."""

from __future__ import annotations


class BPeelError(Exception):
    """Base class for all package errors."""


class InputError(BPeelError, ValueError):
    """Malformed or unusable input data."""


class NonFiniteEntry(InputError):
    def __init__(self, row: int, col: int) -> None:
        super().__init__(f"non-finite entry at row {row}, column {col}")
        self.row = row
        self.col = col


class EmptyMatrix(InputError):
    def __init__(self, shape: tuple[int, ...]) -> None:
        super().__init__(f"matrix must have at least one row and one column, got shape {shape}")
        self.shape = shape


class DimensionMismatch(InputError):
    pass


class LengthMismatch(InputError):
    pass


class TooFewRows(InputError):
    pass


class TooFewScores(InputError):
    pass


class InfeasibleNu(InputError):
    pass


class InvalidRho(InputError):
    pass


class InvalidSpec(InputError):
    pass


class UnknownPreset(InputError):
    pass


class UndefinedMetric(BPeelError, ArithmeticError):
    """A metric whose denominator is empty; callers report it as absent."""


class NoPositives(UndefinedMetric):
    pass


class NoFlagged(UndefinedMetric):
    pass


class OneClassOnly(UndefinedMetric):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingLabelColumn(InputError):
    pass


class MissingOutlierAttribute(InputError):
    pass


class UnsupportedAttributeKind(ParseError):
    pass


class NonNumericFeature(ParseError):
    def __init__(self, row: int, col: str | int, value: str, line: int | None = None) -> None:
        super().__init__(f"non-numeric value {value!r} in row {row}, column {col!r}", line)
        self.row = row
        self.col = col


class IoFailure(BPeelError, OSError):
    pass


class MaxIterationsExceeded(RuntimeWarning):
    """The SMO solver hit its iteration cap; the best iterate is returned."""

"""Observation matrices, validation and unit-variance scaling."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from bpeel.errors import EmptyMatrix, InputError, LengthMismatch, NonFiniteEntry


@dataclass(frozen=True)
class DataMatrix:
    """An immutable n x p matrix of finite observations.

    Build instances through :func:`validate`; the constructor trusts its input.
    """

    values: np.ndarray
    column_names: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def select_columns(self, columns: Sequence[int]) -> DataMatrix:
        cols = np.asarray(columns, dtype=np.intp)
        names = None
        if self.column_names is not None:
            names = tuple(self.column_names[c] for c in cols)
        return _frozen(self.values[:, cols], names)


@dataclass(frozen=True)
class LabeledDataset:
    """A data matrix with optional ground-truth labels (True = outlier)."""

    data: DataMatrix
    labels: np.ndarray | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.labels is None:
            return
        labels = np.asarray(self.labels, dtype=bool)
        if labels.ndim != 1 or labels.shape[0] != self.data.n:
            raise LengthMismatch(
                f"expected {self.data.n} labels, got shape {labels.shape}"
            )
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n_outliers(self) -> int:
        return 0 if self.labels is None else int(self.labels.sum())


MatrixLike = Union[DataMatrix, np.ndarray, Sequence[Sequence[float]]]


def _frozen(values: np.ndarray, names: tuple[str, ...] | None) -> DataMatrix:
    values = np.array(values, dtype=np.float64, order="C", copy=True)
    values.setflags(write=False)
    return DataMatrix(values, names)


def validate(values: MatrixLike, column_names: Sequence[str] | None = None) -> DataMatrix:
    """Check a raw matrix and wrap it as a :class:`DataMatrix`.

    Raises:
        EmptyMatrix: if there are no rows or no columns.
        NonFiniteEntry: at the first NaN or infinite entry, in row-major order.
        InputError: if the input is ragged or not two-dimensional.
    """
    if isinstance(values, DataMatrix):
        if column_names is None:
            return values
        values = values.values
    try:
        arr = np.asarray(values, dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"matrix is not rectangular: {exc}") from None
    if arr.ndim != 2:
        if arr.size == 0:
            raise EmptyMatrix(arr.shape)
        raise InputError(f"expected a 2-D matrix, got {arr.ndim} dimension(s)")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise EmptyMatrix(arr.shape)
    bad = ~np.isfinite(arr)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise NonFiniteEntry(int(row), int(col))
    names = None
    if column_names is not None:
        names = tuple(str(c) for c in column_names)
        if len(names) != arr.shape[1]:
            raise LengthMismatch(
                f"{len(names)} column names given for {arr.shape[1]} columns"
            )
    return _frozen(arr, names)


def as_array(X: MatrixLike) -> np.ndarray:
    """Return the float64 values of ``X``, validating raw input."""
    if isinstance(X, DataMatrix):
        return X.values
    return validate(X).values


def standardize(X: MatrixLike) -> DataMatrix:
    """Scale every column to unit sample variance (ddof=1).

    Means are left in place because the Gaussian kernel only sees
    differences. Constant columns, and single-row inputs, pass through.
    """
    X = validate(X)
    values = X.values
    if X.n < 2:
        return X
    # a column is constant iff all entries are equal; its computed sd can be
    # rounding noise rather than exactly zero
    constant = np.ptp(values, axis=0) == 0
    sd = values.std(axis=0, ddof=1)
    # spreads so small that the sd underflows cannot be scaled; leave them
    constant |= ~(sd > 0)
    scale = np.where(constant, 1.0, sd)
    out = values / scale
    # exact pass-through for constant and already-scaled columns keeps this idempotent
    keep = constant | (sd == 1.0)
    out[:, keep] = values[:, keep]
    return _frozen(out, X.column_names)

"""Gaussian kernel evaluation, K(x, y) = exp(-||x - y||^2 / s).

The bandwidth ``s`` scales the squared distance directly (no factor of two).
By default it equals the number of feature columns the kernel is evaluated
in, so a boundary fit on a column subset uses the subset size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from bpeel.dataset import MatrixLike, as_array
from bpeel.errors import DimensionMismatch, InputError


@dataclass(frozen=True)
class KernelParams:
    bandwidth: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise InputError(f"bandwidth must be positive and finite, got {self.bandwidth}")

    @classmethod
    def for_dimension(cls, p: int) -> KernelParams:
        return cls(float(p))


def _resolve(params: KernelParams | float | None, p: int) -> float:
    if params is None:
        return float(p)
    if isinstance(params, KernelParams):
        return params.bandwidth
    return KernelParams(float(params)).bandwidth


def _gram(A: np.ndarray, B: np.ndarray, s: float) -> np.ndarray:
    # cdist evaluates each pair independently, so entries do not depend on
    # which other rows are present and K(a, b) == K(b, a) bitwise.
    return np.exp(-cdist(A, B, "sqeuclidean") / s)


def gaussian_kernel(x, y, params: KernelParams | float | None = None) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    y = np.asarray(y, dtype=np.float64).reshape(1, -1)
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatch(f"points have lengths {x.shape[1]} and {y.shape[1]}")
    return float(_gram(x, y, _resolve(params, x.shape[1]))[0, 0])


def kernel_matrix(X: MatrixLike, params: KernelParams | float | None = None) -> np.ndarray:
    """Dense n x n Gram matrix with unit diagonal."""
    values = as_array(X)
    return _gram(values, values, _resolve(params, values.shape[1]))


def cross_kernel(
    train: MatrixLike, query: MatrixLike, params: KernelParams | float | None = None
) -> np.ndarray:
    """Kernel values between every training row (rows) and query row (columns)."""
    A = as_array(train)
    B = as_array(query)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(
            f"train has {A.shape[1]} columns but query has {B.shape[1]}"
        )
    return _gram(A, B, _resolve(params, A.shape[1]))

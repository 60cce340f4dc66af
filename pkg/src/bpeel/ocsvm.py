"""One-class SVM trained in the dual with two-variable SMO.

The dual is

    minimize    1/2 * sum_ij a_i a_j K(x_i, x_j)
    subject to  0 <= a_i <= 1 / (nu * n),  sum_i a_i = 1.

Scores use the "positive means outside" orientation:
``score(x) = rho - sum_j a_j K(x_j, x)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from bpeel.dataset import MatrixLike, as_array
from bpeel.errors import DimensionMismatch, InfeasibleNu, InputError, MaxIterationsExceeded
from bpeel.kernel import KernelParams, _gram, cross_kernel

KKT_TOLERANCE = 1e-6
SV_TOLERANCE = 1e-7
# stand-in curvature for a pair whose kernel rows coincide
TAU = 1e-12


@dataclass(frozen=True)
class OcsvmParams:
    """Solver settings.

    Attributes:
        nu: Upper bound on the fraction of bounded support vectors, in (0, 1].
        kernel: Gaussian bandwidth; ``None`` means "number of columns".
        kkt_tolerance: Stop once the maximal violating pair's gradient gap
            falls to this value.
        sv_tolerance: Multipliers above this count as support vectors.
        max_iterations: Cap on SMO steps; ``None`` means ``10000 * n``.
    """

    nu: float = 0.01
    kernel: KernelParams | None = None
    kkt_tolerance: float = KKT_TOLERANCE
    sv_tolerance: float = SV_TOLERANCE
    max_iterations: int | None = None

    def __post_init__(self) -> None:
        if not 0 < self.nu <= 1:
            raise InfeasibleNu(f"nu must lie in (0, 1], got {self.nu}")
        if not self.kkt_tolerance > 0:
            raise InputError(f"kkt_tolerance must be positive, got {self.kkt_tolerance}")
        if not self.sv_tolerance >= 0:
            raise InputError(f"sv_tolerance must be non-negative, got {self.sv_tolerance}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise InputError(f"max_iterations must be positive, got {self.max_iterations}")

    def bandwidth(self, p: int) -> float:
        return float(p) if self.kernel is None else self.kernel.bandwidth


@dataclass(frozen=True)
class OcsvmModel:
    alphas: np.ndarray
    rho: float
    train_rows: np.ndarray
    params: OcsvmParams
    bandwidth: float
    upper: float
    sv_indices: np.ndarray
    iterations: int
    converged: bool

    @property
    def n(self) -> int:
        return self.alphas.shape[0]

    def objective(self) -> float:
        K = _gram(self.train_rows, self.train_rows, self.bandwidth)
        return dual_objective(K, self.alphas)


def dual_objective(K: np.ndarray, alphas: np.ndarray) -> float:
    return 0.5 * float(alphas @ K @ alphas)


def box_upper(nu: float, n: int) -> float:
    return 1.0 / (nu * n)


def smo_solve(
    K: np.ndarray,
    upper: float,
    tol: float = KKT_TOLERANCE,
    max_iter: int | None = None,
    history: list[float] | None = None,
) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """Minimize ``a' K a / 2`` over the capped simplex.

    Starts from the uniform point and repeatedly moves mass onto the
    feasible index with the smallest gradient from the partner that promises
    the largest second-order decrease of the objective.

    Args:
        K: Symmetric positive semidefinite n x n matrix.
        upper: Box bound on each multiplier; must be at least ``1 / n``.
        tol: Stop when ``max_low(g) - min_up(g) <= tol``.
        max_iter: Step cap, ``10000 * n`` by default.
        history: If given, the objective after every step is appended.

    Returns:
        ``(alphas, gradient, iterations, converged)`` where
        ``gradient = K @ alphas``.
    """
    n = K.shape[0]
    if upper * n < 1.0 - 1e-12:
        raise InfeasibleNu(f"box bound {upper} cannot hold unit mass over {n} points")
    if max_iter is None:
        max_iter = 10000 * n
    alpha = np.full(n, 1.0 / n)
    if upper < alpha[0]:
        # only reachable through rounding when upper * n == 1
        upper = alpha[0]
    g = K @ alpha
    if history is not None:
        history.append(0.5 * float(alpha @ g))
    if n == 1:
        return alpha, g, 0, True

    inf = np.inf
    diag = np.diag(K).copy()
    for it in range(max_iter):
        g_up = np.where(alpha < upper, g, inf)
        g_low = np.where(alpha > 0.0, g, -inf)
        i = int(np.argmin(g_up))
        if g_low.max() - g_up[i] <= tol:
            return alpha, g, it, True
        # second-order choice of j: largest guaranteed decrease b^2 / eta,
        # which avoids zigzagging between near-duplicate rows
        b = g_low - g_up[i]
        curvature = diag[i] + diag - 2.0 * K[i]
        decrease = np.where(b > 0, b * b / np.where(curvature > 0, curvature, TAU), -inf)
        j = int(np.argmax(decrease))
        gap = b[j]
        eta = curvature[j]
        room_i = upper - alpha[i]
        room_j = alpha[j]
        delta = gap / eta if eta > 0 else inf
        if delta >= room_i or delta >= room_j:
            if room_i <= room_j:
                delta = room_i
                alpha[i] = upper
                alpha[j] -= delta
                if room_i == room_j:
                    alpha[j] = 0.0
            else:
                delta = room_j
                alpha[i] += delta
                alpha[j] = 0.0
        else:
            alpha[i] += delta
            alpha[j] -= delta
        g += delta * (K[:, i] - K[:, j])
        if history is not None:
            history.append(0.5 * float(alpha @ g))
    return alpha, g, max_iter, False


def recover_rho(
    alphas: np.ndarray, gradient: np.ndarray, upper: float, sv_tolerance: float = SV_TOLERANCE
) -> float:
    """Offset of the hyperplane from the multipliers and ``K @ alphas``.

    Free support vectors sit on the boundary, so their mean gradient is used.
    Without any, the midpoint between the bounded-at-upper and zero sets is
    taken, or the one side that exists.
    """
    free = (alphas > sv_tolerance) & (alphas < upper - sv_tolerance)
    if free.any():
        return float(gradient[free].mean())
    at_upper = alphas >= upper - sv_tolerance
    at_zero = alphas <= sv_tolerance
    if at_upper.any() and at_zero.any():
        return float(0.5 * (gradient[at_upper].max() + gradient[at_zero].min()))
    if at_upper.any():
        return float(gradient[at_upper].max())
    # all mass on points below tolerance cannot happen with sum(alpha) = 1,
    # but keep the chain total: use the heaviest point
    return float(gradient[int(np.argmax(alphas))])


def support_indices(model: OcsvmModel, sv_tolerance: float | None = None) -> np.ndarray:
    tol = model.params.sv_tolerance if sv_tolerance is None else sv_tolerance
    return np.flatnonzero(model.alphas > tol)


def fit(X: MatrixLike, params: OcsvmParams | None = None) -> OcsvmModel:
    """Fit a one-class SVM to the rows of ``X``.

    If the iteration cap is hit, a :class:`MaxIterationsExceeded` warning is
    issued and the last iterate is kept (``converged=False``).
    """
    params = params or OcsvmParams()
    values = as_array(X)
    n, p = values.shape
    s = params.bandwidth(p)
    upper = box_upper(params.nu, n)
    # Solve in lexicographic row order. The SMO path, and hence where it stops
    # inside the tolerance, then does not depend on how the rows were ordered.
    order = np.lexsort(values.T[::-1])
    K = _gram(values[order], values[order], s)
    sorted_alphas, sorted_g, iterations, converged = smo_solve(
        K, upper, params.kkt_tolerance, params.max_iterations
    )
    if not converged:
        warnings.warn(
            f"SMO stopped after {iterations} iterations without reaching "
            f"tolerance {params.kkt_tolerance}",
            MaxIterationsExceeded,
            stacklevel=2,
        )
    rho = recover_rho(sorted_alphas, sorted_g, upper, params.sv_tolerance)
    alphas = np.empty(n)
    alphas[order] = sorted_alphas
    alphas.setflags(write=False)
    sv = np.flatnonzero(alphas > params.sv_tolerance)
    return OcsvmModel(
        alphas=alphas,
        rho=rho,
        train_rows=values,
        params=params,
        bandwidth=s,
        upper=upper,
        sv_indices=sv,
        iterations=iterations,
        converged=converged,
    )


def decision_scores(model: OcsvmModel, query: MatrixLike) -> np.ndarray:
    """Signed distance to the boundary; positive outside, negative inside."""
    Q = as_array(query)
    if Q.shape[1] != model.train_rows.shape[1]:
        raise DimensionMismatch(
            f"model was fit on {model.train_rows.shape[1]} columns, query has {Q.shape[1]}"
        )
    active = np.flatnonzero(model.alphas > 0.0)
    Kq = cross_kernel(model.train_rows[active], Q, model.bandwidth)
    return model.rho - model.alphas[active] @ Kq

"""Boundary Peeling: repeated one-class SVM fits with support-vector removal.

Each peel fits a boundary to the rows that are still present, scores *every*
original row against it, then drops the support vectors. Rows removed early
are the outermost ones; a row's depth is the peel that removed it. The score
of a row is its mean signed distance over all boundaries multiplied by
``peel_count / depth``, and rows whose score exceeds the upper Tukey fence are
flagged.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from bpeel import ocsvm
from bpeel.dataset import MatrixLike, as_array
from bpeel.errors import InputError, TooFewRows, TooFewScores
from bpeel.kernel import KernelParams


@dataclass(frozen=True)
class PeelParams:
    """Settings for a peel run; defaults follow ``BP(S, q=0.01, n_peel=2)``."""

    nu: float = 0.01
    n_peel: int = 2
    bandwidth: float | None = None
    kkt_tolerance: float = ocsvm.KKT_TOLERANCE
    sv_tolerance: float = ocsvm.SV_TOLERANCE
    max_iterations: int | None = None

    def __post_init__(self) -> None:
        if self.n_peel < 1:
            raise InputError(f"n_peel must be a positive integer, got {self.n_peel}")
        # surface invalid nu/tolerances at construction time
        self.ocsvm_params()

    def ocsvm_params(self) -> ocsvm.OcsvmParams:
        return ocsvm.OcsvmParams(
            nu=self.nu,
            kernel=None if self.bandwidth is None else KernelParams(self.bandwidth),
            kkt_tolerance=self.kkt_tolerance,
            sv_tolerance=self.sv_tolerance,
            max_iterations=self.max_iterations,
        )


@dataclass(frozen=True)
class PeelTrace:
    """Outcome of :func:`boundary_peel`.

    Attributes:
        depths: Peel index (1-based) that removed each row; rows never
            removed get ``peel_count``.
        decision_matrix: ``n x peel_count`` signed distances; column ``j`` is
            every row scored against boundary ``j``.
        removed_counts: Rows removed by each peel.
        forced: Peels at which no support vector cleared the tolerance and
            the heaviest survivor was removed instead.
    """

    depths: np.ndarray
    decision_matrix: np.ndarray
    removed_counts: np.ndarray
    forced: tuple[int, ...] = ()

    @property
    def peel_count(self) -> int:
        return self.decision_matrix.shape[1]

    @property
    def n(self) -> int:
        return self.decision_matrix.shape[0]


@dataclass(frozen=True)
class DetectionResult:
    scores: np.ndarray
    threshold: float
    flags: np.ndarray
    peel_count: int
    elapsed: float = field(default=0.0, compare=False)
    trace: PeelTrace | None = field(default=None, compare=False, repr=False)

    @property
    def n_flagged(self) -> int:
        return int(self.flags.sum())


def boundary_peel(X: MatrixLike, params: PeelParams | None = None) -> PeelTrace:
    """Peel boundaries off ``X`` until at most ``n_peel`` rows survive.

    Raises:
        TooFewRows: if ``X`` has ``n_peel`` rows or fewer.
    """
    params = params or PeelParams()
    values = as_array(X)
    n = values.shape[0]
    if n <= params.n_peel:
        raise TooFewRows(f"need more than n_peel={params.n_peel} rows, got {n}")
    svm_params = params.ocsvm_params()
    depths = np.zeros(n, dtype=np.int64)
    survivors = np.arange(n)
    columns: list[np.ndarray] = []
    removed_counts: list[int] = []
    forced: list[int] = []

    while survivors.size > params.n_peel:
        rows = values[survivors]
        model = ocsvm.fit(rows, svm_params)
        columns.append(ocsvm.decision_scores(model, values))
        drop = ocsvm.support_indices(model)
        peel = len(columns)
        if drop.size == 0:
            drop = np.array([int(np.argmax(model.alphas))])
            forced.append(peel)
        depths[survivors[drop]] = peel
        removed_counts.append(int(drop.size))
        survivors = np.delete(survivors, drop)

    peel_count = len(columns)
    depths[survivors] = peel_count
    D = np.column_stack(columns)
    for arr in (depths, D):
        arr.setflags(write=False)
    return PeelTrace(
        depths=depths,
        decision_matrix=D,
        removed_counts=np.asarray(removed_counts, dtype=np.int64),
        forced=tuple(forced),
    )


def depth_weights(trace: PeelTrace) -> np.ndarray:
    return trace.peel_count / trace.depths


def kds_scores(trace: PeelTrace) -> np.ndarray:
    """Kernel distance scores: ``(peel_count / depth_i) * mean_j D[i, j]``."""
    return depth_weights(trace) * trace.decision_matrix.mean(axis=1)


def tukey_threshold(scores) -> float:
    """Upper Tukey fence ``Q3 + 1.5 * IQR`` with linearly interpolated quartiles."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if scores.size < 2:
        raise TooFewScores(f"need at least 2 scores, got {scores.size}")
    q1, q3 = np.quantile(scores, [0.25, 0.75], method="linear")
    return float(q3 + 1.5 * (q3 - q1))


def flag(scores: np.ndarray, threshold: float) -> np.ndarray:
    return np.asarray(scores) > threshold


def bp_detect(X: MatrixLike, params: PeelParams | None = None) -> DetectionResult:
    """Run Boundary Peeling end to end and flag rows above the fence."""
    start = time.perf_counter()
    trace = boundary_peel(X, params)
    scores = kds_scores(trace)
    h = tukey_threshold(scores)
    flags = flag(scores, h)
    elapsed = time.perf_counter() - start
    return DetectionResult(
        scores=scores,
        threshold=h,
        flags=flags,
        peel_count=trace.peel_count,
        elapsed=elapsed,
        trace=trace,
    )

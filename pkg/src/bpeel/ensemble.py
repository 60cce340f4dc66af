"""Ensemble Boundary Peeling via feature bagging.

Each member draws ``floor(sqrt(p))`` columns, peels in that subspace with the
bandwidth set to the subspace size, and yields depth-weighted scores. The
ensemble score is the plain mean of the members' weighted scores, so a single
member that sees every column reproduces :func:`bpeel.peel.bp_detect`.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from bpeel.dataset import MatrixLike, as_array
from bpeel.errors import InputError
from bpeel.peel import (
    DetectionResult,
    PeelParams,
    boundary_peel,
    flag,
    kds_scores,
    tukey_threshold,
)

FeatureSampler = Callable[[int, np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class EnsembleParams:
    base: PeelParams = field(default_factory=PeelParams)
    c: int = 50
    seed: int = 42

    def __post_init__(self) -> None:
        if self.c < 1:
            raise InputError(f"ensemble size c must be at least 1, got {self.c}")


def subset_size(p: int) -> int:
    return max(1, math.isqrt(p))


def member_rng(seed: int, member: int) -> np.random.Generator:
    """Generator for one ensemble member, keyed only by ``(seed, member)``."""
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), member]))


def sample_features(p: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``max(1, floor(sqrt(p)))`` distinct column indices, sorted."""
    if p < 1:
        raise InputError(f"p must be positive, got {p}")
    return np.sort(rng.choice(p, size=subset_size(p), replace=False))


def all_features(p: int, rng: np.random.Generator) -> np.ndarray:
    return np.arange(p)


def member_scores(
    values: np.ndarray,
    params: EnsembleParams,
    member: int,
    sampler: FeatureSampler = sample_features,
) -> tuple[np.ndarray, int]:
    cols = sampler(values.shape[1], member_rng(params.seed, member))
    sub = np.ascontiguousarray(values[:, cols])
    # bandwidth follows the subspace unless the caller pinned one
    trace = boundary_peel(sub, params.base)
    return kds_scores(trace), trace.peel_count


def ebp_detect(
    X: MatrixLike,
    params: EnsembleParams | None = None,
    *,
    sampler: FeatureSampler = sample_features,
    workers: int = 1,
) -> DetectionResult:
    """Run Ensemble Boundary Peeling.

    Args:
        X: Observations.
        params: Base peel settings, ensemble size and seed.
        sampler: Column-subset generator; swap in :func:`all_features` to
            disable bagging.
        workers: Thread count for evaluating members. Results are reduced in
            member order, so output does not depend on this value.

    Returns:
        Result whose ``scores`` are the ensemble means and whose
        ``peel_count`` is the mean peel count, rounded.
    """
    params = params or EnsembleParams()
    values = as_array(X)
    start = time.perf_counter()

    def run(e: int) -> tuple[np.ndarray, int]:
        return member_scores(values, params, e, sampler)

    if workers > 1 and params.c > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            members = list(pool.map(run, range(params.c)))
    else:
        members = [run(e) for e in range(params.c)]

    total = members[0][0].copy()
    for scores, _ in members[1:]:
        total += scores
    ekds = total / params.c
    h = tukey_threshold(ekds)
    peel_count = int(round(sum(pc for _, pc in members) / params.c))
    return DetectionResult(
        scores=ekds,
        threshold=h,
        flags=flag(ekds, h),
        peel_count=peel_count,
        elapsed=time.perf_counter() - start,
    )

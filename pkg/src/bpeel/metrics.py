"""Detection rate, correct classification, precision and ROC AUC, in percent.

Outliers are the positive class. DR and precision are undefined when their
denominator is empty; the functions raise and :func:`evaluate` records
``None`` so aggregates can skip them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from bpeel.errors import InputError, LengthMismatch, NoFlagged, NoPositives, OneClassOnly


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def _bools(x, name: str) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional")
    return arr.astype(bool)


def confusion(flags, labels) -> Confusion:
    f = _bools(flags, "flags")
    y = _bools(labels, "labels")
    if f.shape != y.shape:
        raise LengthMismatch(f"{f.size} flags but {y.size} labels")
    return Confusion(
        tp=int(np.sum(f & y)),
        fp=int(np.sum(f & ~y)),
        tn=int(np.sum(~f & ~y)),
        fn=int(np.sum(~f & y)),
    )


def detection_rate(c: Confusion) -> float:
    if c.tp + c.fn == 0:
        raise NoPositives("detection rate needs at least one true outlier")
    return c.tp / (c.tp + c.fn) * 100


def correct_classification(c: Confusion) -> float:
    if c.n == 0:
        raise InputError("correct classification rate of an empty set")
    return (c.tp + c.tn) / c.n * 100


def precision(c: Confusion) -> float:
    if c.tp + c.fp == 0:
        raise NoFlagged("precision needs at least one flagged observation")
    return c.tp / (c.tp + c.fp) * 100


def roc_auc(scores, labels) -> float:
    """Probability that an outlier outscores an inlier, ties counting half.

    Uses the rank-sum form of the Mann-Whitney U statistic with midranks,
    which is exact for the half-credit tie rule.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = _bools(labels, "labels")
    if s.shape != y.shape:
        raise LengthMismatch(f"{s.size} scores but {y.size} labels")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly("AUC needs both outliers and inliers")
    # midranks are multiples of 1/2, so 2*U is an exact integer for n < 2**50
    ranks2 = np.rint(2 * rankdata(s, method="average")).astype(np.int64)
    u2 = int(ranks2[y].sum()) - n_pos * (n_pos + 1)
    return u2 / (2 * n_pos * n_neg) * 100


@dataclass(frozen=True)
class Evaluation:
    cc: float
    dr: float | None
    prec: float | None
    auc: float | None
    confusion: Confusion


def evaluate(flags, scores, labels) -> Evaluation:
    """All four measures; undefined ones come back as ``None``."""
    c = confusion(flags, labels)

    def maybe(fn, *args):
        try:
            return fn(*args)
        except (NoPositives, NoFlagged, OneClassOnly):
            return None

    return Evaluation(
        cc=correct_classification(c),
        dr=maybe(detection_rate, c),
        prec=maybe(precision, c),
        auc=maybe(roc_auc, scores, labels),
        confusion=c,
    )

"""Simulation replications and benchmark-directory runs.

Replicate ``r`` of a simulation draws its data from a generator keyed by
``(seed, r)`` and results are gathered by index, so the emitted means do not
depend on the number of worker processes.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from bpeel.dataset import DataMatrix, standardize
from bpeel.ensemble import EnsembleParams, ebp_detect
from bpeel.errors import BPeelError, InputError
from bpeel.io import MetricRow, load_dataset
from bpeel.metrics import evaluate
from bpeel.peel import DetectionResult, PeelParams, bp_detect
from bpeel.presets import get_preset
from bpeel.synth import CONTAMINATION_LEVELS, ScenarioConfig, inject_outliers, replicate_rng

logger = logging.getLogger(__name__)

METHODS = ("bp", "ebp")
DEFAULT_REPLICATES = 100
DATASET_SUFFIXES = (".arff", ".csv")


@dataclass(frozen=True)
class ExperimentPlan:
    """What to run and how.

    ``source`` is a preset name, a :class:`ScenarioConfig`, or a directory of
    dataset files.
    """

    source: str | ScenarioConfig | Path
    methods: tuple[str, ...] = METHODS
    replicates: int = DEFAULT_REPLICATES
    seed: int = 42
    peel: PeelParams = field(default_factory=PeelParams)
    ensembles: int = 50
    workers: int = 1
    timing: bool = True
    standardize: bool = False
    label: str = "outlier"
    positive_token: str = "yes"

    def __post_init__(self) -> None:
        object.__setattr__(self, "methods", tuple(m.lower() for m in self.methods))
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise InputError(f"unknown method(s): {', '.join(sorted(unknown))}")
        if not self.methods:
            raise InputError("no methods selected")
        if self.replicates < 1:
            raise InputError(f"replicates must be at least 1, got {self.replicates}")
        if self.workers < 1:
            raise InputError(f"workers must be at least 1, got {self.workers}")


def derived_seed(*key: int) -> int:
    """A 63-bit seed that is a pure function of ``key``."""
    state = np.random.SeedSequence([k & (2**64 - 1) for k in key]).generate_state(1, np.uint64)
    return int(state[0] >> np.uint64(1))


def run_method(
    method: str,
    X: DataMatrix | np.ndarray,
    peel: PeelParams,
    *,
    ensembles: int = 50,
    seed: int = 42,
    workers: int = 1,
) -> DetectionResult:
    if method == "bp":
        return bp_detect(X, peel)
    if method == "ebp":
        return ebp_detect(X, EnsembleParams(base=peel, c=ensembles, seed=seed), workers=workers)
    raise InputError(f"unknown method {method!r}")


@dataclass(frozen=True)
class _Outcome:
    group: str
    method: str
    cc: float
    dr: float | None
    prec: float | None
    auc: float | None
    seconds: float


def _mean(values: Sequence[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return float(np.sum(present) / len(present))


def _aggregate(outcomes: Sequence[_Outcome], methods: Sequence[str], timing: bool,
               group_order: Sequence[str] = ()) -> list[MetricRow]:
    groups: dict[tuple[str, str], list[_Outcome]] = {}
    for o in outcomes:
        groups.setdefault((o.group, o.method), []).append(o)
    rank = {g: k for k, g in enumerate(group_order)}
    keys = sorted(
        groups,
        key=lambda gm: (rank.get(gm[0], len(rank)), gm[0], methods.index(gm[1])),
    )
    rows = []
    for key in keys:
        items = groups[key]
        rows.append(
            MetricRow(
                dataset=key[0],
                method=key[1],
                cc=_mean([o.cc for o in items]),
                dr=_mean([o.dr for o in items]),
                prec=_mean([o.prec for o in items]),
                auc=_mean([o.auc for o in items]),
                seconds=_mean([o.seconds for o in items]) if timing else None,
            )
        )
    return rows


def scenario_for(plan: ExperimentPlan, replicate: int) -> tuple[ScenarioConfig, np.random.Generator]:
    rng = replicate_rng(plan.seed, replicate)
    if isinstance(plan.source, ScenarioConfig):
        return plan.source, rng
    if isinstance(plan.source, str):
        return get_preset(plan.source).config(rng), rng
    raise InputError(f"{plan.source!r} is not a simulation source")


def _simulate_one(plan: ExperimentPlan, replicate: int) -> list[_Outcome]:
    config, rng = scenario_for(plan, replicate)
    data = inject_outliers(config, rng)
    X = standardize(data.data) if plan.standardize else data.data
    group = config.name or "custom"
    outcomes = []
    for method in plan.methods:
        result = run_method(
            method, X, plan.peel,
            ensembles=plan.ensembles, seed=derived_seed(plan.seed, replicate),
        )
        ev = evaluate(result.flags, result.scores, data.labels)
        if data.n_outliers == 0:
            # only CC is meaningful on clean data
            ev = replace(ev, dr=None, prec=None, auc=None)
        outcomes.append(_Outcome(group, method, ev.cc, ev.dr, ev.prec, ev.auc, result.elapsed))
    return outcomes


def _map_indexed(fn, plan: ExperimentPlan, items: Sequence) -> list:
    if plan.workers == 1 or len(items) < 2:
        return [fn(plan, item) for item in items]
    with ProcessPoolExecutor(max_workers=plan.workers) as pool:
        return list(pool.map(fn, [plan] * len(items), items))


def run_simulation(plan: ExperimentPlan) -> list[MetricRow]:
    """Replicate a scenario and return per-scenario means for every method.

    DR, precision and AUC are averaged over the replicates where they are
    defined (outliers present, something flagged).
    """
    per_rep = _map_indexed(_simulate_one, plan, list(range(plan.replicates)))
    outcomes = [o for rep in per_rep for o in rep]
    order = [f"random:{lvl}" for lvl in CONTAMINATION_LEVELS]
    return _aggregate(outcomes, plan.methods, plan.timing, order)


def dataset_group(path: Path) -> str:
    """Original dataset name of a versioned file, e.g. ``Parkinson`` for
    ``Parkinson_withoutdupl_norm_05_v01.arff``."""
    return path.stem.split("_", 1)[0]


@dataclass(frozen=True)
class BenchmarkReport:
    rows: list[MetricRow]
    failures: list[tuple[str, str]]
    files: int


def _bench_one(plan: ExperimentPlan, path: Path) -> list[_Outcome] | tuple[str, str]:
    try:
        data = load_dataset(path, "auto", plan.label, plan.positive_token)
        X = standardize(data.data) if plan.standardize else data.data
        outcomes = []
        for method in plan.methods:
            result = run_method(
                method, X, plan.peel, ensembles=plan.ensembles, seed=plan.seed
            )
            ev = evaluate(result.flags, result.scores, data.labels)
            outcomes.append(
                _Outcome(dataset_group(path), method, ev.cc, ev.dr, ev.prec, ev.auc, result.elapsed)
            )
        return outcomes
    except (BPeelError, OSError) as exc:
        return (str(path), f"{type(exc).__name__}: {exc}")


def dataset_files(directory: str | Path) -> list[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"not a directory: {root}")
    return sorted(p for p in root.iterdir() if p.is_file() and p.suffix.lower() in DATASET_SUFFIXES)


def run_benchmark(plan: ExperimentPlan) -> BenchmarkReport:
    """Run each method on every dataset file and average per original dataset.

    Timings cover only the detection call. A file that fails to load or
    detect is recorded in ``failures`` and skipped.
    """
    files = dataset_files(plan.source)
    if not files:
        raise InputError(f"no .arff or .csv files in {plan.source}")
    results = _map_indexed(_bench_one, plan, files)
    outcomes: list[_Outcome] = []
    failures: list[tuple[str, str]] = []
    for path, res in zip(files, results):
        if isinstance(res, tuple):
            logger.warning("skipping %s: %s", path, res[1])
            failures.append(res)
        else:
            outcomes.extend(res)
    return BenchmarkReport(_aggregate(outcomes, plan.methods, plan.timing), failures, len(files))

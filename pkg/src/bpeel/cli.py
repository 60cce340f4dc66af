"""Command-line entry point: ``bpeel detect | simulate | bench``.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from bpeel import __version__
from bpeel.bench import (
    DEFAULT_REPLICATES,
    METHODS,
    ExperimentPlan,
    run_benchmark,
    run_method,
    run_simulation,
)
from bpeel.dataset import standardize
from bpeel.errors import BPeelError, InputError, IoFailure
from bpeel.io import METRIC_HEADER, load_dataset, write_metrics, write_scores, write_trace
from bpeel.metrics import evaluate
from bpeel.peel import PeelParams
from bpeel.presets import get_preset, preset_names
from bpeel.synth import config_from_dict

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
SEED_ENV = "BPEEL_SEED"

log = logging.getLogger("bpeel")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"bpeel: {SEED_ENV} must be an integer, got {raw!r}") from None


def _methods(text: str) -> tuple[str, ...]:
    methods = tuple(m.strip().lower() for m in text.split(",") if m.strip())
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {', '.join(METHODS)}")
    return methods


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_detector_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("detector")
    g.add_argument("--nu", type=float, default=0.01, help="one-class SVM nu (default 0.01)")
    g.add_argument("--n-peel", type=_positive_int, default=2,
                   help="stop peeling once this many rows remain (default 2)")
    g.add_argument("--ensembles", "-c", type=_positive_int, default=50,
                   help="EBP ensemble size (default 50)")
    g.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default ${SEED_ENV} or 42)")
    g.add_argument("--standardize", action="store_true",
                   help="scale columns to unit variance before detection")
    g.add_argument("--workers", type=_positive_int, default=1,
                   help="worker pool size for ensembles, replicates or files")


def _add_label_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("auto", "csv", "arff"), default="auto")
    p.add_argument("--label-column", default="outlier",
                   help="label column/attribute name (default 'outlier')")
    p.add_argument("--positive-token", default="yes",
                   help="label value marking an outlier (default 'yes')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bpeel", description="Boundary Peeling outlier detection."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="score one dataset")
    det.add_argument("--input", "-i", required=True, type=Path)
    det.add_argument("--output", "-o", required=True, type=Path, help="score CSV to write")
    det.add_argument("--method", choices=METHODS, default="bp")
    det.add_argument("--trace", type=Path, help="also write per-peel distances (bp only)")
    _add_label_options(det)
    _add_detector_options(det)

    sim = sub.add_parser("simulate", help="replicate a synthetic scenario")
    sim.add_argument("--scenario", "-s", help="preset name or path to a scenario JSON file")
    sim.add_argument("--list-presets", action="store_true", help="print preset names and exit")
    sim.add_argument("--replicates", "-r", type=_positive_int, default=DEFAULT_REPLICATES,
                     help=f"replicates per scenario (default {DEFAULT_REPLICATES}; "
                          "raise for tighter means)")
    sim.add_argument("--methods", type=_methods, default=METHODS, help="comma-separated, e.g. bp,ebp")
    sim.add_argument("--output", "-o", type=Path, help="metrics CSV to write")
    sim.add_argument("--no-timing", action="store_true",
                     help="leave the seconds column empty so output is byte-reproducible")
    _add_detector_options(sim)

    ben = sub.add_parser("bench", help="run every dataset file in a directory")
    ben.add_argument("--input", "-i", required=True, type=Path, help="dataset directory")
    ben.add_argument("--output", "-o", type=Path, help="metrics CSV to write")
    ben.add_argument("--methods", type=_methods, default=METHODS)
    ben.add_argument("--no-timing", action="store_true")
    _add_label_options(ben)
    _add_detector_options(ben)
    return parser


def _peel_params(args) -> PeelParams:
    return PeelParams(nu=args.nu, n_peel=args.n_peel)


def _banner(args) -> None:
    skip = {"verbose", "list_presets"}
    items = [f"{k}={v}" for k, v in sorted(vars(args).items()) if k not in skip]
    print("bpeel " + " ".join(items), file=sys.stderr)


def _fmt(v: float | None) -> str:
    return "NA" if v is None else f"{v:.3f}"


def cmd_detect(args) -> int:
    data = load_dataset(args.input, args.format, args.label_column, args.positive_token,
                        require_labels=False)
    X = standardize(data.data) if args.standardize else data.data
    result = run_method(args.method, X, _peel_params(args), ensembles=args.ensembles,
                        seed=args.seed, workers=args.workers)
    write_scores(result, args.output)
    if args.trace is not None:
        write_trace(result, args.trace)
    print(f"n={X.n} p={X.p} flagged={result.n_flagged} threshold={result.threshold:.6g} "
          f"peels={result.peel_count} seconds={result.elapsed:.3f}")
    if data.labels is not None:
        ev = evaluate(result.flags, result.scores, data.labels)
        print(f"CC={_fmt(ev.cc)} DR={_fmt(ev.dr)} PREC={_fmt(ev.prec)} AUC={_fmt(ev.auc)}")
    return EXIT_OK


def _print_rows(rows) -> None:
    print(",".join(METRIC_HEADER))
    for row in rows:
        print(",".join(row.cells()))


def cmd_simulate(args) -> int:
    if args.list_presets:
        for name in preset_names():
            print(name)
        return EXIT_OK
    if not args.scenario:
        raise InputError("--scenario is required")
    if args.scenario.endswith(".json"):
        path = Path(args.scenario)
        try:
            source = config_from_dict(json.loads(path.read_text()))
        except FileNotFoundError:
            raise InputError(f"no such file: {path}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from None
    else:
        source = get_preset(args.scenario).name
    plan = ExperimentPlan(
        source=source, methods=args.methods, replicates=args.replicates, seed=args.seed,
        peel=_peel_params(args), ensembles=args.ensembles, workers=args.workers,
        timing=not args.no_timing, standardize=args.standardize,
    )
    rows = run_simulation(plan)
    if args.output is not None:
        write_metrics(rows, args.output)
    _print_rows(rows)
    return EXIT_OK


def cmd_bench(args) -> int:
    plan = ExperimentPlan(
        source=args.input, methods=args.methods, seed=args.seed, peel=_peel_params(args),
        ensembles=args.ensembles, workers=args.workers, timing=not args.no_timing,
        standardize=args.standardize, label=args.label_column,
        positive_token=args.positive_token,
    )
    report = run_benchmark(plan)
    if args.output is not None:
        write_metrics(report.rows, args.output)
    _print_rows(report.rows)
    print(f"files={report.files} failed={len(report.failures)}", file=sys.stderr)
    for path, reason in report.failures:
        print(f"  failed {path}: {reason}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"detect": cmd_detect, "simulate": cmd_simulate, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.seed is None:
        args.seed = _default_seed()
    _banner(args)
    try:
        return COMMANDS[args.command](args)
    except (InputError, IoFailure) as exc:
        print(f"bpeel: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BPeelError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"bpeel: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

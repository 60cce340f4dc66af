"""Reading benchmark files and writing score and metric tables.

The ARFF reader handles the subset used by the Campos et al. outlier
collection: numeric attributes, a nominal ``outlier`` attribute with
``yes``/``no`` values, an optional ``id`` attribute, ``%`` comments and a
dense ``@data`` section.
"""

from __future__ import annotations

import csv
import math
import os
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from bpeel.dataset import LabeledDataset, validate
from bpeel.errors import (
    InputError,
    IoFailure,
    MissingLabelColumn,
    MissingOutlierAttribute,
    NonNumericFeature,
    ParseError,
    UnsupportedAttributeKind,
)
from bpeel.peel import DetectionResult

DEFAULT_LABEL = "outlier"
DEFAULT_POSITIVE = "yes"
SCORE_HEADER = ("index", "score", "flag")
METRIC_HEADER = ("dataset", "method", "cc", "dr", "prec", "auc", "seconds")

_NUMERIC_KINDS = {"numeric", "real", "integer"}


def _read_text(path: str | os.PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _parse_float(token: str, row: int, col: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise NonNumericFeature(row, col, token, line) from None
    if not math.isfinite(value):
        raise NonNumericFeature(row, col, token, line)
    return value


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


# ---------------------------------------------------------------- CSV


def read_csv(
    path: str | os.PathLike,
    label_column: str | None = DEFAULT_LABEL,
    positive_token: str = DEFAULT_POSITIVE,
    *,
    require_labels: bool = True,
    drop_columns: Sequence[str] = (),
) -> LabeledDataset:
    """Load a CSV file with a header row.

    Every column other than ``label_column`` and ``drop_columns`` must be
    numeric. Labels are true where the label cell equals ``positive_token``
    (case-insensitive, surrounding whitespace ignored).

    Raises:
        MissingLabelColumn: if the label column is absent and
            ``require_labels`` is set.
        NonNumericFeature: for a feature cell that is not a finite number.
        ParseError: for a row with the wrong number of cells.
    """
    text = _read_text(path)
    reader = csv.reader(text.splitlines())
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("file is empty", 1) from None
    if label_column is not None and label_column in header:
        label_idx = header.index(label_column)
    elif require_labels:
        raise MissingLabelColumn(f"{path}: no column named {label_column!r}")
    else:
        label_idx = None
    dropped = {header.index(c) for c in drop_columns if c in header}
    feature_idx = [i for i in range(len(header)) if i != label_idx and i not in dropped]
    if not feature_idx:
        raise ParseError("no feature columns", 1)

    rows: list[list[float]] = []
    labels: list[bool] = []
    token = positive_token.strip().lower()
    for cells in reader:
        line = reader.line_num
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(cells)}", line)
        r = len(rows)
        rows.append([_parse_float(cells[i].strip(), r, header[i], line) for i in feature_idx])
        if label_idx is not None:
            labels.append(cells[label_idx].strip().lower() == token)
    data = validate(rows if rows else np.empty((0, len(feature_idx))), [header[i] for i in feature_idx])
    return LabeledDataset(data, labels if label_idx is not None else None, name=Path(path).stem)


# ---------------------------------------------------------------- ARFF


@dataclass(frozen=True)
class ArffAttribute:
    name: str
    kind: str  # "numeric" or "nominal"
    values: tuple[str, ...] = ()


@dataclass(frozen=True)
class ArffDocument:
    relation: str
    attributes: tuple[ArffAttribute, ...]
    rows: tuple[tuple[str, ...], ...]
    row_lines: tuple[int, ...] = ()


_ATTR_RE = re.compile(
    r"""@attribute\s+('(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*"|\S+)\s+(.+)$""", re.IGNORECASE
)


def _split_values(body: str, line: int) -> list[str]:
    try:
        return [_unquote(v) for v in next(csv.reader([body], quotechar="'", skipinitialspace=True))]
    except (csv.Error, StopIteration) as exc:
        raise ParseError(f"cannot split {body!r}: {exc}", line) from None


def parse_arff(text: str) -> ArffDocument:
    """Parse ARFF text into its declarations and raw data cells."""
    relation = ""
    attributes: list[ArffAttribute] = []
    seen: set[str] = set()
    rows: list[tuple[str, ...]] = []
    row_lines: list[int] = []
    in_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            if line.startswith("{"):
                raise ParseError("sparse ARFF rows are not supported", lineno)
            cells = _split_values(line, lineno)
            if len(cells) != len(attributes):
                raise ParseError(
                    f"expected {len(attributes)} values, found {len(cells)}", lineno
                )
            for attr, cell in zip(attributes, cells):
                if attr.kind == "nominal" and cell not in attr.values and cell != "?":
                    raise ParseError(
                        f"value {cell!r} not declared for attribute {attr.name!r}", lineno
                    )
            rows.append(tuple(cells))
            row_lines.append(lineno)
            continue
        keyword = line.split(None, 1)[0].lower()
        if keyword == "@relation":
            parts = line.split(None, 1)
            relation = _unquote(parts[1]) if len(parts) > 1 else ""
        elif keyword == "@attribute":
            m = _ATTR_RE.match(line)
            if not m:
                raise ParseError(f"malformed attribute declaration {line!r}", lineno)
            name = _unquote(m.group(1))
            spec = m.group(2).strip()
            if name.lower() in seen:
                raise ParseError(f"duplicate attribute {name!r}", lineno)
            seen.add(name.lower())
            if spec.startswith("{"):
                if not spec.endswith("}"):
                    raise ParseError(f"unterminated nominal list for {name!r}", lineno)
                values = tuple(_split_values(spec[1:-1], lineno))
                attributes.append(ArffAttribute(name, "nominal", values))
            elif spec.lower() in _NUMERIC_KINDS:
                attributes.append(ArffAttribute(name, "numeric"))
            else:
                raise UnsupportedAttributeKind(
                    f"attribute {name!r} has unsupported type {spec.split()[0]!r}", lineno
                )
        elif keyword == "@data":
            if not attributes:
                raise ParseError("@data before any @attribute", lineno)
            in_data = True
        else:
            raise ParseError(f"unexpected line {line!r}", lineno)
    if not in_data:
        raise ParseError("no @data section")
    return ArffDocument(relation, tuple(attributes), tuple(rows), tuple(row_lines))


def read_arff(
    path: str | os.PathLike,
    label_attribute: str = DEFAULT_LABEL,
    positive_token: str = DEFAULT_POSITIVE,
    *,
    require_labels: bool = True,
    id_attribute: str = "id",
) -> LabeledDataset:
    """Load an ARFF file as features plus outlier labels.

    Numeric attributes become features. The nominal ``label_attribute``
    supplies labels and ``id_attribute`` is dropped; both are matched
    case-insensitively. Any other nominal attribute is rejected.
    """
    doc = parse_arff(_read_text(path))
    label_idx = None
    feature_idx = []
    for k, attr in enumerate(doc.attributes):
        lname = attr.name.lower()
        if lname == label_attribute.lower():
            label_idx = k
        elif lname == id_attribute.lower():
            continue
        elif attr.kind == "numeric":
            feature_idx.append(k)
        else:
            raise UnsupportedAttributeKind(
                f"nominal attribute {attr.name!r} cannot be used as a feature"
            )
    if label_idx is None and require_labels:
        raise MissingOutlierAttribute(f"{path}: no attribute named {label_attribute!r}")
    if not feature_idx:
        raise ParseError("no numeric attributes")

    names = [doc.attributes[k].name for k in feature_idx]
    values = np.empty((len(doc.rows), len(feature_idx)))
    for r, (cells, line) in enumerate(zip(doc.rows, doc.row_lines)):
        for c, k in enumerate(feature_idx):
            values[r, c] = _parse_float(cells[k], r, names[c], line)
    labels = None
    if label_idx is not None:
        token = positive_token.lower()
        labels = [cells[label_idx].lower() == token for cells in doc.rows]
    return LabeledDataset(validate(values, names), labels, name=doc.relation or Path(path).stem)


def load_dataset(
    path: str | os.PathLike,
    fmt: str = "auto",
    label: str = DEFAULT_LABEL,
    positive_token: str = DEFAULT_POSITIVE,
    *,
    require_labels: bool = True,
) -> LabeledDataset:
    """Dispatch to the CSV or ARFF reader by ``fmt`` or the file extension."""
    if fmt == "auto":
        suffix = Path(path).suffix.lower()
        if suffix == ".arff":
            fmt = "arff"
        elif suffix in {".csv", ".txt"}:
            fmt = "csv"
        else:
            raise InputError(f"cannot infer format of {path}; pass --format")
    if fmt == "arff":
        return read_arff(path, label, positive_token, require_labels=require_labels)
    if fmt == "csv":
        return read_csv(path, label, positive_token, require_labels=require_labels)
    raise InputError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------- writers


def _open_for_write(path: str | os.PathLike):
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(x), ".17g")


def write_scores(result: DetectionResult, path: str | os.PathLike) -> None:
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCORE_HEADER)
        for i, (s, f) in enumerate(zip(result.scores, result.flags)):
            w.writerow((i, format_float(s), int(bool(f))))


def read_scores(path: str | os.PathLike) -> tuple[np.ndarray, np.ndarray]:
    """Read back a score file as ``(scores, flags)``."""
    rows = list(csv.reader(_read_text(path).splitlines()))
    if not rows or tuple(rows[0]) != SCORE_HEADER:
        raise ParseError("not a score file (bad header)", 1)
    scores = np.array([float(r[1]) for r in rows[1:]])
    flags = np.array([r[2] == "1" for r in rows[1:]])
    return scores, flags


def write_trace(result: DetectionResult, path: str | os.PathLike) -> None:
    """Per-peel signed distances and depths, one row per observation."""
    trace = result.trace
    if trace is None:
        raise InputError("result carries no peel trace")
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "depth"] + [f"peel_{j + 1}" for j in range(trace.peel_count)])
        for i in range(trace.n):
            w.writerow(
                [i, int(trace.depths[i])] + [format_float(v) for v in trace.decision_matrix[i]]
            )


@dataclass(frozen=True)
class MetricRow:
    dataset: str
    method: str
    cc: float
    dr: float | None
    prec: float | None
    auc: float | None
    seconds: float | None

    def cells(self) -> list[str]:
        def metric(v: float | None) -> str:
            return "" if v is None else f"{v:.6f}"

        secs = "" if self.seconds is None else f"{self.seconds:.3f}"
        return [self.dataset, self.method, metric(self.cc), metric(self.dr),
                metric(self.prec), metric(self.auc), secs]


def write_metrics(rows: Iterable[MetricRow], path: str | os.PathLike) -> None:
    """Metric table; undefined metrics are left as empty cells."""
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_HEADER)
        for row in rows:
            w.writerow(row.cells())

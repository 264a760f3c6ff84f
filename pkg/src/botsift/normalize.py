"""Per-column normalization and the canonical training CSV.

The default scaler maps a raw value x against its fitted column minimum via

    v = log2((x - min) / (x + min) + 1)

which lands in [0, 1] for x >= min >= 0. Note the degenerate corner: when a
column's fitted minimum is 0, every positive value maps to exactly 1, so the
column collapses to {0, 1}. That collapse is a real property of this formula,
kept as the default for fidelity; a plain min-max scaler is available as the
"minmax" method for callers who want smooth columns instead.

Statistics are fitted on training data only and frozen for later transforms.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    BelowFittedMin,
    EmptyFit,
    IoFailure,
    MalformedJson,
    SchemaMismatch,
    UnlabeledRecord,
)
from .features import FEATURE_COLUMNS, N_FEATURES, FeatureVector
from .ingest import Label

logger = logging.getLogger(__name__)

LOG_RATIO = "log-ratio"
MINMAX = "minmax"
METHODS = (LOG_RATIO, MINMAX)

STATS_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class NormalizationStats:
    """Frozen per-column statistics, fitted once on a training set."""

    column_mins: tuple[float, ...]
    column_maxs: tuple[float, ...]
    fitted_on: int
    method: str = LOG_RATIO

    def __post_init__(self):
        if len(self.column_mins) != N_FEATURES or len(self.column_maxs) != N_FEATURES:
            raise SchemaMismatch(
                f"stats must carry {N_FEATURES} columns, got "
                f"{len(self.column_mins)}/{len(self.column_maxs)}"
            )
        if self.method not in METHODS:
            raise SchemaMismatch(f"unknown normalization method: {self.method}")


def fit(rows: Sequence[FeatureVector], method: str = LOG_RATIO) -> NormalizationStats:
    """Column minima/maxima over the given rows."""
    if not rows:
        raise EmptyFit("cannot fit normalization statistics on zero rows")
    if method not in METHODS:
        raise SchemaMismatch(f"unknown normalization method: {method}")
    mins = tuple(min(row[j] for row in rows) for j in range(N_FEATURES))
    maxs = tuple(max(row[j] for row in rows) for j in range(N_FEATURES))
    return NormalizationStats(
        column_mins=mins, column_maxs=maxs, fitted_on=len(rows), method=method
    )


def transform_value(x: float, min_value: float, clamp: bool = True) -> float:
    """Log-ratio map of one value against its fitted column minimum.

    Returns 0 when x == min_value (including the all-zero corner) and
    approaches 1 as x grows. Values below the fitted minimum appear when
    unseen data undercuts the training range: with clamp=True (default)
    they map to 0, otherwise BelowFittedMin is raised.
    """
    if x < min_value:
        if clamp:
            return 0.0
        raise BelowFittedMin(f"value {x} below fitted minimum {min_value}")
    if x + min_value == 0:
        return 0.0
    return math.log2((x - min_value) / (x + min_value) + 1.0)


def _minmax_value(x: float, min_value: float, max_value: float, clamp: bool = True) -> float:
    if x < min_value:
        if clamp:
            return 0.0
        raise BelowFittedMin(f"value {x} below fitted minimum {min_value}")
    if max_value == min_value:
        # constant column: no spread to scale against
        return 0.0
    return min((x - min_value) / (max_value - min_value), 1.0)


def transform_row(
    v: FeatureVector, stats: NormalizationStats, clamp: bool = True
) -> tuple[float, ...]:
    """Elementwise transform of one raw feature vector."""
    if stats.method == MINMAX:
        return tuple(
            _minmax_value(x, mn, mx, clamp=clamp)
            for x, mn, mx in zip(v, stats.column_mins, stats.column_maxs)
        )
    return tuple(
        transform_value(x, mn, clamp=clamp) for x, mn in zip(v, stats.column_mins)
    )


def transform_rows(
    rows: Iterable[FeatureVector], stats: NormalizationStats, clamp: bool = True
) -> tuple[list[tuple[float, ...]], int]:
    """Transform many rows; also report how many values were clamped."""
    out = []
    clamped = 0
    for row in rows:
        clamped += sum(1 for x, mn in zip(row, stats.column_mins) if x < mn)
        out.append(transform_row(row, stats, clamp=clamp))
    if clamped:
        logger.warning("%d values fell below their fitted column minimum and were clamped", clamped)
    return out, clamped


def stats_sidecar_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".stats.json")


def save_stats(stats: NormalizationStats, path: str | Path) -> None:
    payload = {
        "schema_version": STATS_SCHEMA_VERSION,
        "method": stats.method,
        "columns": list(FEATURE_COLUMNS),
        "column_mins": list(stats.column_mins),
        "column_maxs": list(stats.column_maxs),
        "fitted_on": stats.fitted_on,
    }
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write stats to {path}: {exc}") from exc


def load_stats(path: str | Path) -> NormalizationStats:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read stats from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid stats file {path}: {exc}") from exc
    if payload.get("schema_version") != STATS_SCHEMA_VERSION:
        raise SchemaMismatch(
            f"unsupported stats schema_version: {payload.get('schema_version')!r}"
        )
    try:
        return NormalizationStats(
            column_mins=tuple(float(v) for v in payload["column_mins"]),
            column_maxs=tuple(float(v) for v in payload["column_maxs"]),
            fitted_on=int(payload["fitted_on"]),
            method=payload["method"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedJson(f"invalid stats file {path}: {exc}") from exc


def emit_csv(
    rows: Sequence[tuple[FeatureVector, Label]],
    stats: NormalizationStats,
    path: str | Path,
    stats_path: str | Path | None = None,
) -> int:
    """Write the normalized training CSV plus its stats sidecar.

    Header row, then one line per record: nine normalized values at six
    decimal places and the label as 0 (human) / 1 (bot). Returns the number
    of clamped below-minimum values.
    """
    for _, label in rows:
        if label is Label.UNLABELED:
            raise UnlabeledRecord("cannot emit CSV rows without labels")
    transformed, clamped = transform_rows([v for v, _ in rows], stats)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(FEATURE_COLUMNS + ("label",)) + "\n")
            for values, (_, label) in zip(transformed, rows):
                rendered = ",".join(f"{x:.6f}" for x in values)
                fh.write(f"{rendered},{1 if label is Label.BOT else 0}\n")
    except OSError as exc:
        raise IoFailure(f"cannot write CSV to {path}: {exc}") from exc
    save_stats(stats, stats_path if stats_path is not None else stats_sidecar_path(path))
    return clamped


def load_csv(path: str | Path) -> tuple[list[tuple[float, ...]], list[Label]]:
    """Read a normalized CSV back into (rows, labels)."""
    expected_header = list(FEATURE_COLUMNS + ("label",))
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise MalformedJson(f"CSV {path} is empty (missing header)") from None
            if header != expected_header:
                raise MalformedJson(f"CSV {path} header mismatch: {header}")
            rows: list[tuple[float, ...]] = []
            labels: list[Label] = []
            for lineno, cells in enumerate(reader, start=2):
                if len(cells) != N_FEATURES + 1:
                    raise MalformedJson(f"CSV {path} line {lineno}: expected {N_FEATURES + 1} cells")
                try:
                    rows.append(tuple(float(c) for c in cells[:N_FEATURES]))
                    label_cell = int(cells[-1])
                except ValueError as exc:
                    raise MalformedJson(f"CSV {path} line {lineno}: {exc}") from exc
                if label_cell not in (0, 1):
                    raise MalformedJson(f"CSV {path} line {lineno}: label must be 0 or 1")
                labels.append(Label.BOT if label_cell == 1 else Label.HUMAN)
    except OSError as exc:
        raise IoFailure(f"cannot read CSV from {path}: {exc}") from exc
    return rows, labels

"""Confusion-matrix construction and the four evaluation measures.

Bot is the positive class throughout. Metrics with a zero denominator
(precision with no positive predictions, recall with no positive truth)
come back as None rather than a fabricated 0 or an exception, so sweeps
over degenerate models stay total.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyInput, EmptyMatrix, LengthMismatch, UnlabeledRecord
from .ingest import Label


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"confusion count {name} must be >= 0")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None


def confusion(predictions: Sequence[Label], truth: Sequence[Label]) -> ConfusionMatrix:
    """Count TP/FP/TN/FN over paired predicted and true labels."""
    if len(predictions) != len(truth):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(truth)} truth labels"
        )
    if not predictions:
        raise EmptyInput("cannot build a confusion matrix from zero samples")
    tp = fp = tn = fn = 0
    for pred, actual in zip(predictions, truth):
        if pred is Label.UNLABELED or actual is Label.UNLABELED:
            raise UnlabeledRecord("confusion counting needs definite labels")
        if actual is Label.BOT:
            if pred is Label.BOT:
                tp += 1
            else:
                fn += 1
        else:
            if pred is Label.BOT:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def evaluate(matrix: ConfusionMatrix) -> EvalReport:
    """Accuracy, precision, recall, and F1 from a confusion matrix."""
    if matrix.total == 0:
        raise EmptyMatrix("cannot evaluate an empty confusion matrix")
    accuracy = (matrix.tp + matrix.tn) / matrix.total
    precision = matrix.tp / (matrix.tp + matrix.fp) if matrix.tp + matrix.fp > 0 else None
    recall = matrix.tp / (matrix.tp + matrix.fn) if matrix.tp + matrix.fn > 0 else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return EvalReport(
        confusion=matrix, accuracy=accuracy, precision=precision, recall=recall, f1=f1
    )


def report_to_dict(report: EvalReport) -> dict:
    """JSON-ready rendering; undefined metrics serialize as null."""
    return {
        "confusion": {
            "tp": report.confusion.tp,
            "fp": report.confusion.fp,
            "tn": report.confusion.tn,
            "fn": report.confusion.fn,
        },
        "accuracy": report.accuracy,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
    }

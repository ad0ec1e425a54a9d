"""Binary detection metrics over error/no-error judgements.

Positive class: the sentence contains an error. Every ratio uses the
zero-denominator-means-zero convention so degenerate corpora never raise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ClassificationCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} is negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ClassificationCounts") -> "ClassificationCounts":
        return ClassificationCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )


@dataclass(frozen=True)
class MetricsTriple:
    precision: float
    recall: float
    f1: float


def classify_outcomes(
    predictions: Sequence[bool], gold: Sequence[bool]
) -> ClassificationCounts:
    """Tally confusion counts for aligned prediction/gold label sequences."""
    if len(predictions) != len(gold):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(gold)} labels")
    tp = fp = tn = fn = 0
    for predicted, actual in zip(predictions, gold):
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif not predicted and actual:
            fn += 1
        else:
            tn += 1
    return ClassificationCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


def precision_recall_f1(counts: ClassificationCounts) -> MetricsTriple:
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsTriple(precision=precision, recall=recall, f1=f1)


def accuracy(counts: ClassificationCounts) -> float:
    return _ratio(counts.tp + counts.tn, counts.total)


def false_positive_rate(counts: ClassificationCounts) -> float:
    return _ratio(counts.fp, counts.fp + counts.tn)


def false_negative_rate(counts: ClassificationCounts) -> float:
    return _ratio(counts.fn, counts.fn + counts.tp)

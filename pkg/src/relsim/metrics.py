"""Precision/recall/F arithmetic, per-class tables, and threshold sweeps.

A guess that answers with two labels contributes two guesses and at most
one correct. Any zero denominator makes the affected value 0. Per-class
averages are macroaverages: compute per class, then average with equal
weight per class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DataFormatError, UnknownLabelError
from .nounmod import ClassificationOutput


@dataclass(frozen=True)
class PrfRecord:
    precision: float
    recall: float
    f: float
    correct: int
    guesses: int
    possible: int


def _ratio(num: int, denom: int) -> float:
    return num / denom if denom else 0.0


def harmonic(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def prf(correct: int, guesses: int, possible: int) -> PrfRecord:
    """Precision, recall, and F from raw counts."""
    if min(correct, guesses, possible) < 0:
        raise DataFormatError("counts must be non-negative")
    if correct > guesses:
        raise DataFormatError(f"correct ({correct}) exceeds guesses ({guesses})")
    if correct > possible:
        raise DataFormatError(f"correct ({correct}) exceeds possible ({possible})")
    p = _ratio(correct, guesses)
    r = _ratio(correct, possible)
    return PrfRecord(p, r, harmonic(p, r), correct, guesses, possible)


@dataclass(frozen=True)
class ClassPrfTable:
    """Per-class records plus their unweighted (macro) averages."""

    classes: tuple[str, ...]
    per_class: dict[str, PrfRecord]
    precision: float
    recall: float
    f: float

    @property
    def mean_size(self) -> float:
        return sum(rec.possible for rec in self.per_class.values()) / len(self.classes)


def per_class_prf(
    predictions: Sequence[ClassificationOutput],
    gold: Sequence[str],
    classes: Sequence[str] | None = None,
) -> ClassPrfTable:
    """Macroaveraged per-class precision/recall/F.

    For a class c: guesses are predictions containing c, correct are those
    whose gold label is c, possible is c's gold count.
    """
    if len(predictions) != len(gold):
        raise DataFormatError("predictions and gold differ in length")
    vocabulary = tuple(classes) if classes is not None else tuple(sorted(set(gold)))
    known = set(vocabulary)
    for label in gold:
        if label not in known:
            raise UnknownLabelError(f"gold label outside vocabulary: {label!r}")
    for pred in predictions:
        for label in pred.labels:
            if label not in known:
                raise UnknownLabelError(f"predicted label outside vocabulary: {label!r}")
    table = {}
    for cls in vocabulary:
        guesses = sum(1 for p in predictions if cls in p.labels)
        correct = sum(
            1 for p, g in zip(predictions, gold) if cls in p.labels and g == cls
        )
        possible = sum(1 for g in gold if g == cls)
        table[cls] = prf(correct, guesses, possible)
    n = len(vocabulary)
    return ClassPrfTable(
        vocabulary,
        table,
        sum(r.precision for r in table.values()) / n,
        sum(r.recall for r in table.values()) / n,
        sum(r.f for r in table.values()) / n,
    )


def accuracy(predictions: Sequence[ClassificationOutput], gold: Sequence[str]) -> float:
    """Fraction answered with exactly the gold label; abstentions and
    double answers never count as correct."""
    if len(predictions) != len(gold):
        raise DataFormatError("predictions and gold differ in length")
    if not predictions:
        return 0.0
    hits = sum(
        1 for p, g in zip(predictions, gold) if p.is_single and p.labels[0] == g
    )
    return hits / len(predictions)


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    precision: float
    recall: float
    f: float


def sweep(
    evaluate: Callable[[float], "PrfRecord | ClassPrfTable"],
    thresholds: Sequence[float],
) -> list[SweepRow]:
    """Evaluate at each threshold; rows come back sorted by threshold.

    `evaluate` recomputes decisions from already-known cosines or
    neighbours; nothing here touches a count provider.
    """
    if not thresholds:
        raise DataFormatError("threshold list is empty")
    rows = []
    for t in sorted(thresholds):
        result = evaluate(t)
        rows.append(SweepRow(t, result.precision, result.recall, result.f))
    return rows

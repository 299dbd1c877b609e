"""Noun-modifier relation classification by nearest-neighbour vote.

Leave-one-out: each pair is classified against all the others using cosine
similarity of relation vectors. The margin between the two nearest
neighbours drives abstention (positive threshold) or double-labelling
(negative threshold); neighbours that already agree short-circuit the rule.

The 30-label vocabulary collapses onto 5 coarse groups. Neighbour selection
depends only on vector geometry, so classifying with collapsed labels is
the same as collapsing the chosen neighbours' labels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DataFormatError, UnknownLabelError
from .vectors import RelationVector, cosine

CLASS_GROUPS: dict[str, tuple[str, ...]] = {
    "causality": ("cs", "eff", "prp", "detr"),
    "temporality": ("freq", "tat", "tthr"),
    "spatial": ("dir", "loc", "lat", "lfr"),
    "participant": (
        "ag", "ben", "inst", "obj", "obj_prop", "part",
        "posr", "prop", "prod", "src", "st", "whl",
    ),
    "quality": ("cntr", "cont", "eq", "mat", "meas", "top", "type"),
}

LABEL_TO_GROUP: dict[str, str] = {
    label: group for group, labels in CLASS_GROUPS.items() for label in labels
}

LABELS_30: tuple[str, ...] = tuple(sorted(LABEL_TO_GROUP))
GROUPS_5: tuple[str, ...] = tuple(sorted(CLASS_GROUPS))


def collapse_class(label: str) -> str:
    """Map a fine-grained relation label to its coarse group."""
    try:
        return LABEL_TO_GROUP[label]
    except KeyError:
        raise UnknownLabelError(f"unknown relation label: {label!r}") from None


@dataclass(frozen=True)
class LabeledPair:
    modifier: str
    head: str
    label: str

    def __post_init__(self):
        if self.label not in LABEL_TO_GROUP:
            raise UnknownLabelError(f"unknown relation label: {self.label!r}")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.modifier, self.head)

    @property
    def group(self) -> str:
        return LABEL_TO_GROUP[self.label]


def read_labeled_pairs(path: str | Path) -> list[LabeledPair]:
    """Parse the dataset TSV: modifier, head, label. '#' starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot read dataset {path}: {exc}") from exc
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) != 3 or not all(cols):
            raise DataFormatError(
                f"{path}:{lineno}: expected 3 tab-separated columns (modifier, head, label)"
            )
        pairs.append(LabeledPair(cols[0].lower(), cols[1].lower(), cols[2]))
    if not pairs:
        raise DataFormatError(f"{path}: no labeled pairs")
    return pairs


def nearest_two(
    query: RelationVector,
    training: Sequence[RelationVector],
    rng: random.Random,
) -> tuple[int, int, float]:
    """Indices of the two most cosine-similar training vectors plus margin."""
    if len(training) < 2:
        raise DataFormatError(f"need at least 2 training vectors, got {len(training)}")
    cosines = [cosine(query, vec) for vec in training]
    order = sorted(range(len(training)), key=lambda i: (-cosines[i], rng.random()))
    first, second = order[0], order[1]
    return first, second, cosines[first] - cosines[second]


@dataclass(frozen=True)
class FoldNeighbours:
    """Leave-one-out geometry for one item: nearest two of the rest."""

    index: int
    first: int
    second: int
    margin: float


def loocv_neighbours(
    vectors: Sequence[RelationVector], seed: int
) -> list[FoldNeighbours]:
    """Two nearest neighbours of each vector among all the others.

    Label-independent, so one pass serves any labelling and any threshold.
    Fold order never affects results: the tie-break source is derived per
    fold from (seed, fold index).
    """
    if len(vectors) < 3:
        raise DataFormatError(f"need at least 3 items, got {len(vectors)}")
    folds = []
    for i, query in enumerate(vectors):
        rng = random.Random(f"{seed}:{i}")
        others = [j for j in range(len(vectors)) if j != i]
        cosines = [cosine(query, vectors[j]) for j in others]
        order = sorted(range(len(others)), key=lambda k: (-cosines[k], rng.random()))
        folds.append(
            FoldNeighbours(
                i,
                others[order[0]],
                others[order[1]],
                cosines[order[0]] - cosines[order[1]],
            )
        )
    return folds


@dataclass(frozen=True)
class ClassificationOutput:
    index: int
    kind: str  # "abstain" | "single" | "double"
    labels: tuple[str, ...]
    margin: float

    @property
    def is_single(self) -> bool:
        return self.kind == "single"


def classify_from_neighbours(
    folds: Sequence[FoldNeighbours],
    labels: Sequence[str],
    threshold: float,
) -> list[ClassificationOutput]:
    """Margin rule over precomputed neighbours.

    Same-class neighbours always answer with that class. Otherwise: answer
    with the nearest neighbour's class when |threshold| <= margin, abstain
    when threshold > margin, answer with both classes when threshold <
    -margin.
    """
    outputs = []
    for fold in folds:
        first_label = labels[fold.first]
        second_label = labels[fold.second]
        if first_label == second_label or abs(threshold) <= fold.margin:
            outputs.append(
                ClassificationOutput(fold.index, "single", (first_label,), fold.margin)
            )
        elif threshold > fold.margin:
            outputs.append(ClassificationOutput(fold.index, "abstain", (), fold.margin))
        else:
            outputs.append(
                ClassificationOutput(
                    fold.index, "double", (first_label, second_label), fold.margin
                )
            )
    return outputs


def loocv_classify(
    vectors: Sequence[RelationVector],
    labels: Sequence[str],
    threshold: float,
    seed: int,
) -> list[ClassificationOutput]:
    """Leave-one-out nearest-neighbour classification with the margin rule."""
    if len(vectors) != len(labels):
        raise DataFormatError("vectors and labels differ in length")
    return classify_from_neighbours(loocv_neighbours(vectors, seed), labels, threshold)

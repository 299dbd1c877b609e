"""Multiple-choice analogy solving with margin-based skip/double-guess.

The margin is the best cosine minus the second-best cosine. A positive
threshold skips low-margin questions (higher precision); a negative
threshold answers them with both top choices (higher recall). Cosine ties
are broken by seeded random order, derived per question so batch order and
parallelism never change a result.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .errors import DataFormatError, TermsMismatchError
from .metrics import PrfRecord, prf
from .vectors import RelationVector, VectorStore, cosine

CHOICES_PER_QUESTION = 5


@dataclass(frozen=True)
class AnalogyQuestion:
    qid: str
    stem: tuple[str, str]
    choices: tuple[tuple[str, str], ...]
    gold: int

    def __post_init__(self):
        if len(self.choices) != CHOICES_PER_QUESTION:
            raise DataFormatError(
                f"question {self.qid}: expected {CHOICES_PER_QUESTION} choices, "
                f"got {len(self.choices)}"
            )
        if not 0 <= self.gold < CHOICES_PER_QUESTION:
            raise DataFormatError(f"question {self.qid}: gold index {self.gold} out of range")

    def pairs(self) -> list[tuple[str, str]]:
        return [self.stem, *self.choices]


def read_questions(path: str | Path) -> list[AnalogyQuestion]:
    """Parse the question TSV: id, stem pair, five choice pairs, gold index.

    Fourteen tab-separated columns per line (id, stemA, stemB, c1A, c1B,
    ..., c5A, c5B, gold); blank lines and '#' comments are ignored; words
    are lowercased.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot read question file {path}: {exc}") from exc
    questions = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) != 14:
            raise DataFormatError(
                f"{path}:{lineno}: expected 14 tab-separated columns, got {len(cols)}"
            )
        words = [w.lower() for w in cols[1:13]]
        if not all(words):
            raise DataFormatError(f"{path}:{lineno}: empty word")
        try:
            gold = int(cols[13])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad gold index {cols[13]!r}") from exc
        choices = tuple((words[2 * i + 2], words[2 * i + 3]) for i in range(5))
        questions.append(AnalogyQuestion(cols[0], (words[0], words[1]), choices, gold))
    if not questions:
        raise DataFormatError(f"{path}: no questions")
    return questions


@dataclass(frozen=True)
class Decision:
    """Outcome of the margin rule for one question."""

    kind: str  # "skip" | "guess" | "double"
    indices: tuple[int, ...]
    margin: float | None  # None only for a zero-stem skip

    @classmethod
    def skip(cls, margin: float | None = None) -> "Decision":
        return cls("skip", (), margin)

    @classmethod
    def guess(cls, index: int, margin: float) -> "Decision":
        return cls("guess", (index,), margin)

    @classmethod
    def double(cls, first: int, second: int, margin: float) -> "Decision":
        if first == second:
            raise ValueError("double-guess indices must differ")
        return cls("double", (first, second), margin)


def question_rng(seed: int, qid: str) -> random.Random:
    """Tie-break source derived from (global seed, question id)."""
    return random.Random(f"{seed}:{qid}")


def score_choices(
    stem_vec: RelationVector, choice_vecs: Sequence[RelationVector]
) -> list[float]:
    """Cosine of the stem vector against each choice vector, in order."""
    for vec in choice_vecs:
        if vec.table_sha != stem_vec.table_sha:
            raise TermsMismatchError(stem_vec.table_sha, vec.table_sha)
    return [cosine(stem_vec, vec) for vec in choice_vecs]


def ranked_by_cosine(cosines: Sequence[float], rng: random.Random) -> list[int]:
    """Indices by descending cosine; exact ties in seeded random order."""
    return sorted(range(len(cosines)), key=lambda i: (-cosines[i], rng.random()))


def decide(
    cosines: Sequence[float],
    stem_zero: bool,
    threshold: float,
    rng: random.Random,
) -> Decision:
    """Apply the margin rule to one question's choice cosines.

    Zero stem vector: skip outright. Otherwise guess the best choice,
    unless the margin falls below a positive threshold (skip) or below the
    magnitude of a negative threshold (guess both top choices). A margin
    exactly equal to the threshold magnitude still answers normally.
    """
    if stem_zero:
        return Decision.skip()
    order = ranked_by_cosine(cosines, rng)
    best, second = order[0], order[1]
    margin = cosines[best] - cosines[second]
    if threshold > 0 and margin < threshold:
        return Decision.skip(margin)
    if threshold < 0 and margin < -threshold:
        return Decision.double(best, second, margin)
    return Decision.guess(best, margin)


def rank_candidates(
    stem_vec: RelationVector, pool: Sequence[RelationVector]
) -> list[int]:
    """Pool indices by descending cosine to the stem; ties by pool index."""
    if not pool:
        raise DataFormatError("empty candidate pool")
    cosines = score_choices(stem_vec, pool)
    return sorted(range(len(pool)), key=lambda i: (-cosines[i], i))


@dataclass(frozen=True)
class RankRow:
    rank: int
    matches: int
    matches_pct: float
    cumulative: int
    cumulative_pct: float


def cumulative_rank_table(gold_ranks: Sequence[int], k: int) -> list[RankRow]:
    """Histogram of gold ranks 1..k with running totals.

    Percentages are fractions of the full rank list (items ranked past k
    included in the denominator); an empty list yields all-zero rows.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if any(r < 1 for r in gold_ranks):
        raise ValueError("ranks must be >= 1")
    total = len(gold_ranks)
    rows = []
    cumulative = 0
    for rank in range(1, k + 1):
        matches = sum(1 for r in gold_ranks if r == rank)
        cumulative += matches
        rows.append(
            RankRow(
                rank,
                matches,
                matches / total if total else 0.0,
                cumulative,
                cumulative / total if total else 0.0,
            )
        )
    return rows


def format_rank_table(rows: Sequence[RankRow]) -> str:
    """Fixed-width human rendering; percentages to one decimal place."""
    out = [f"{'rank':>4}  {'matches':>7}  {'%':>6}  {'cumulative':>10}  {'cum %':>6}"]
    for row in rows:
        out.append(
            f"{row.rank:>4}  {row.matches:>7}  {100 * row.matches_pct:>6.1f}"
            f"  {row.cumulative:>10}  {100 * row.cumulative_pct:>6.1f}"
        )
    return "\n".join(out)


@dataclass(frozen=True)
class SolveResult:
    question: AnalogyQuestion
    cosines: tuple[float, ...]
    decision: Decision

    @property
    def correct(self) -> bool:
        return self.question.gold in self.decision.indices


def solve_question(
    question: AnalogyQuestion,
    store: VectorStore,
    threshold: float,
    seed: int,
) -> SolveResult:
    stem_vec = store.get(*question.stem)
    choice_vecs = [store.get(*pair) for pair in question.choices]
    cosines = score_choices(stem_vec, choice_vecs)
    decision = decide(cosines, stem_vec.is_zero, threshold, question_rng(seed, question.qid))
    return SolveResult(question, tuple(cosines), decision)


def solve_all(
    questions: Sequence[AnalogyQuestion],
    store: VectorStore,
    threshold: float,
    seed: int,
    jobs: int = 1,
) -> list[SolveResult]:
    """Solve a batch; results are in question order whatever `jobs` is."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(
                pool.map(lambda q: solve_question(q, store, threshold, seed), questions)
            )
    return [solve_question(q, store, threshold, seed) for q in questions]


def summarize_results(results: Sequence[SolveResult]) -> PrfRecord:
    """Aggregate decisions: every question counts toward the possible total,
    a double answer counts as two guesses."""
    correct = sum(1 for r in results if r.correct)
    guesses = sum(len(r.decision.indices) for r in results)
    return prf(correct, guesses, len(results))


def sweep_evaluator(
    questions: Sequence[AnalogyQuestion],
    store: VectorStore,
    seed: int,
) -> Callable[[float], PrfRecord]:
    """Precompute cosines once; re-decide per threshold without re-counting."""
    prepared = []
    for question in questions:
        stem_vec = store.get(*question.stem)
        cosines = score_choices(stem_vec, [store.get(*p) for p in question.choices])
        prepared.append((question, cosines, stem_vec.is_zero))

    def evaluate(threshold: float) -> PrfRecord:
        correct = 0
        guesses = 0
        for question, cosines, stem_zero in prepared:
            decision = decide(
                cosines, stem_zero, threshold, question_rng(seed, question.qid)
            )
            guesses += len(decision.indices)
            correct += question.gold in decision.indices
        return prf(correct, guesses, len(prepared))

    return evaluate


def gold_rank_experiment(
    questions: Sequence[AnalogyQuestion], store: VectorStore
) -> tuple[list[AnalogyQuestion], list[list[int]], list[int]]:
    """Rank every gold pair against the pool of all gold pairs.

    Questions whose stem vector is all-zero are dropped from both the stem
    list and the pool. Returns (kept questions, per-question ranking of
    pool indices, per-question rank of its own gold pair).
    """
    kept = [q for q in questions if not store.get(*q.stem).is_zero]
    pool = [store.get(*q.choices[q.gold]) for q in kept]
    rankings = []
    gold_ranks = []
    for i, question in enumerate(kept):
        order = rank_candidates(store.get(*question.stem), pool)
        rankings.append(order)
        gold_ranks.append(order.index(i) + 1)
    return kept, rankings, gold_ranks

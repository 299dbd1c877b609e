"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them inline).

Tolerances are pinned here and nowhere else: exact integer equality for
counting and collapse criteria, 1e-12 for margins and cosine algebra,
±0.05 percentage points for percentage goldens, 60 s wall-clock budgets
for the randomized counting sweep and the end-to-end pipeline.
"""

import random
import time
from pathlib import Path

import numpy as np

from conftest import index_from_token_lists
from oracle import naive_count, random_corpus, random_pattern, random_word
from relsim.analogy import cumulative_rank_table, decide, format_rank_table, question_rng
from relsim.cli import main
from relsim.metrics import accuracy, prf
from relsim.nounmod import (
    ClassificationOutput,
    classify_from_neighbours,
    collapse_class,
    loocv_classify,
    loocv_neighbours,
)
from relsim.patterns import JoiningTermTable, generate_queries, stem
from relsim.vectors import RelationVector, cosine_values

SAMPLE = Path(__file__).parent.parent / "sample_data"

# Class sizes of the 600-pair reference dataset, by fine-grained label.
REFERENCE_CLASS_SIZES = {
    "ag": 36, "ben": 9, "cntr": 3, "cont": 15, "cs": 17, "detr": 4,
    "dir": 8, "eff": 34, "eq": 5, "freq": 16, "inst": 35, "lat": 22,
    "lfr": 21, "loc": 5, "mat": 32, "meas": 30, "obj": 33, "obj_prop": 15,
    "part": 9, "posr": 30, "prod": 16, "prop": 49, "prp": 31, "src": 12,
    "st": 9, "tat": 30, "top": 45, "tthr": 6, "type": 16, "whl": 7,
}

# Published histogram of gold ranks for the 369-candidate ranking run.
REFERENCE_RANK_HISTOGRAM = {1: 31, 2: 19, 3: 13, 4: 11, 5: 6, 6: 7, 7: 9, 8: 5, 9: 5, 10: 3}
REFERENCE_RANK_ROWS = [
    (1, 31, 8.4, 31, 8.4),
    (2, 19, 5.1, 50, 13.6),
    (3, 13, 3.5, 63, 17.1),
    (4, 11, 3.0, 74, 20.1),
    (5, 6, 1.6, 80, 21.7),
    (6, 7, 1.9, 87, 23.6),
    (7, 9, 2.4, 96, 26.0),
    (8, 5, 1.4, 101, 27.4),
    (9, 5, 1.4, 106, 28.7),
    (10, 3, 0.8, 109, 29.5),
]

REFERENCE_COSINES = [0.31874, 0.57234, 0.68757, 0.49725, 0.69265]


def report(name: str, ok: bool) -> None:
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion failed: {name}"


def test_c01_counting_matches_naive_scan_on_10000_cases():
    rng = random.Random(20030515)
    started = time.monotonic()
    cases = 0
    mismatches = 0

    def run_block(corpus, n_patterns):
        nonlocal cases, mismatches
        idx = index_from_token_lists(corpus)
        for _ in range(n_patterns):
            pattern = random_pattern(rng, corpus)
            if idx.count_documents(pattern) != naive_count(corpus, pattern):
                mismatches += 1
            cases += 1

    for _ in range(120):
        run_block(random_corpus(rng, max_docs=50), 80)
    for n_docs in (300, 500, 800, 1000):
        corpus = [
            [random_word(rng) for _ in range(rng.randint(0, 20))]
            for _ in range(n_docs)
        ]
        run_block(corpus, 100)

    elapsed = time.monotonic() - started
    report(
        "C1 oracle equivalence on 10,000 random (pattern, corpus) cases "
        f"({cases} cases, {mismatches} mismatches, {elapsed:.1f}s)",
        cases == 10000 and mismatches == 0 and elapsed < 60.0,
    )


def test_c02_stemming_goldens():
    golden = {
        "advertisement": "advertise*",
        "compliance": "complia*",
        "rhythm": "rhythm*",
        "up": "up",
        # length boundaries 2, 3, 8, 9, 10, 11
        "at": "at",
        "cat": "cat*",
        "notebook": "notebook*",
        "restraint": "restra*",
        "restrained": "restrai*",
        "restraining": "restrai*",
    }
    failures = {w: stem(w).stemmed for w, e in golden.items() if stem(w).stemmed != e}
    report(f"C2 stemming goldens and length boundaries {sorted(golden)}", not failures)


def test_c03_query_generation_counts(tmp_path):
    table = JoiningTermTable.default()
    worked = generate_queries(("restrained", "limit"), table)
    ok = len(worked.queries) == 128 and "restrai* * very limit*" in worked.queries

    rng = random.Random(42)
    words = lambda: "".join(rng.choice("abcdefghijklmnop") for _ in range(rng.randint(3, 12)))
    lines = []
    for qid in range(374):
        row = [f"q{qid}"] + [words() for _ in range(12)] + [str(rng.randint(0, 4))]
        lines.append("\t".join(row))
    qfile = tmp_path / "many.tsv"
    qfile.write_text("\n".join(lines) + "\n", encoding="utf-8")

    from relsim.analogy import read_questions

    questions = read_questions(qfile)
    slots = 0
    for question in questions:
        for pair in question.pairs():
            queries = generate_queries(pair, table).queries
            ok = ok and len(queries) == 128
            slots += len(queries)
    report(
        f"C3 query generation: 128 per pair, worked example verbatim, "
        f"374-question file yields {slots} query slots",
        ok and slots == 287232,
    )


def test_c04_margin_golden():
    margin_ok = True
    decision = decide(REFERENCE_COSINES, False, 0.0, question_rng(0, "ref"))
    margin_ok &= decision.kind == "guess" and decision.indices == (4,)
    margin_ok &= abs(decision.margin - 0.00508) <= 1e-12

    skip = decide(REFERENCE_COSINES, False, 0.00509, question_rng(0, "ref"))
    margin_ok &= skip.kind == "skip"
    double = decide(REFERENCE_COSINES, False, -0.00509, question_rng(0, "ref"))
    margin_ok &= double.kind == "double" and double.indices == (4, 2)
    # at a threshold exactly equal to the margin the question is answered
    exact = REFERENCE_COSINES[4] - REFERENCE_COSINES[2]
    margin_ok &= decide(REFERENCE_COSINES, False, exact, question_rng(0, "ref")).kind == "guess"
    margin_ok &= decide(REFERENCE_COSINES, False, -exact, question_rng(0, "ref")).kind == "guess"
    report("C4 margin logic golden (0.00508, guess/skip/double-guess)", margin_ok)


def test_c05_metric_arithmetic():
    record = prf(176, 369, 374)
    ok = (
        abs(100 * record.precision - 47.7) <= 0.05
        and abs(100 * record.recall - 47.1) <= 0.05
        and abs(100 * record.f - 47.4) <= 0.05
    )
    zero = prf(0, 0, 10)
    ok = ok and zero.precision == 0.0 and zero.recall == 0.0 and zero.f == 0.0

    def single(i, label):
        return ClassificationOutput(i, "single", (label,), 0.1)

    gold = ["x"] * 600
    preds_167 = [single(i, "x" if i < 167 else "y") for i in range(600)]
    preds_274 = [single(i, "x" if i < 274 else "y") for i in range(600)]
    ok = ok and abs(100 * accuracy(preds_167, gold) - 27.8) <= 0.05
    ok = ok and abs(100 * accuracy(preds_274, gold) - 45.7) <= 0.05
    report("C5 metric arithmetic (47.7/47.1/47.4, 27.8, 45.7, zero rule)", ok)


def test_c06_class_collapse_sizes():
    groups = {}
    for label, size in REFERENCE_CLASS_SIZES.items():
        groups[collapse_class(label)] = groups.get(collapse_class(label), 0) + size
    expected = {
        "causality": 86,
        "participant": 260,
        "quality": 146,
        "spatial": 56,
        "temporality": 52,
    }
    report(
        f"C6 class collapse sizes {sorted(groups.items())}",
        groups == expected and sum(REFERENCE_CLASS_SIZES.values()) == 600,
    )


def test_c07_cumulative_rank_table():
    ok = True
    # hand-computed small case
    rows = cumulative_rank_table([1, 1, 2], k=2)
    ok &= (rows[0].matches, rows[0].cumulative) == (2, 2)
    ok &= abs(100 * rows[0].matches_pct - 66.7) <= 0.05
    ok &= abs(100 * rows[1].cumulative_pct - 100.0) <= 0.05

    # the published 369-stem histogram
    ranks = [r for r, n in REFERENCE_RANK_HISTOGRAM.items() for _ in range(n)]
    ranks += [60] * (369 - len(ranks))
    rows = cumulative_rank_table(ranks, k=10)
    for row, (rank, matches, pct, cum, cum_pct) in zip(rows, REFERENCE_RANK_ROWS):
        ok &= row.rank == rank and row.matches == matches and row.cumulative == cum
        ok &= abs(100 * row.matches_pct - pct) <= 0.05
        ok &= abs(100 * row.cumulative_pct - cum_pct) <= 0.05
    rendered = format_rank_table(rows).splitlines()
    ok &= "8.4" in rendered[1] and "29.5" in rendered[10]
    report("C7 cumulative rank table (counts exact, percentages ±0.05)", ok)


def test_c08_loocv_property_suite():
    ok = True

    # identical-within-class vectors classify perfectly
    vectors, labels = [], []
    for c, label in enumerate(("ag", "mat", "freq", "loc")):
        counts = [0] * 4
        counts[c] = 7
        for _ in range(5):
            vectors.append(RelationVector("m", "h", tuple(counts), "s"))
            labels.append(label)
    outputs = loocv_classify(vectors, labels, threshold=0.0, seed=1)
    ok &= all(o.kind == "single" and o.labels[0] == labels[o.index] for o in outputs)

    # no self-neighbour, margins non-negative
    rng = random.Random(99)
    rand_vecs = [
        RelationVector("m", "h", tuple(rng.randint(0, 9) or 1 for _ in range(10)), "s")
        for _ in range(30)
    ]
    folds = loocv_neighbours(rand_vecs, seed=5)
    ok &= all(f.first != f.index and f.second != f.index for f in folds)
    ok &= all(f.margin >= 0 for f in folds)

    # abstention monotone over increasing non-negative thresholds
    rand_labels = [rng.choice(("ag", "mat", "freq")) for _ in rand_vecs]
    abstained = [
        sum(
            1
            for o in classify_from_neighbours(folds, rand_labels, t)
            if o.kind == "abstain"
        )
        for t in (0.0, 0.002, 0.01, 0.05, 0.25, 1.0)
    ]
    ok &= abstained == sorted(abstained)

    # fine labels collapsed at the neighbours == direct coarse-label run
    from relsim.nounmod import LABELS_30

    consistent = 0
    for trial in range(200):
        n = rng.randint(5, 14)
        vecs = [
            RelationVector("m", "h", tuple(rng.randint(0, 20) for _ in range(8)), "s")
            for _ in range(n)
        ]
        vecs = [
            v if any(v.raw_counts) else RelationVector("m", "h", (1,) * 8, "s")
            for v in vecs
        ]
        fine = [rng.choice(LABELS_30) for _ in range(n)]
        coarse = [collapse_class(label) for label in fine]
        threshold = rng.choice((-0.3, -0.05, 0.0, 0.05, 0.3))
        fold_set = loocv_neighbours(vecs, seed=trial)
        collapsed_at_neighbours = classify_from_neighbours(fold_set, coarse, threshold)
        direct = loocv_classify(vecs, coarse, threshold, seed=trial)
        consistent += collapsed_at_neighbours == direct
    ok &= consistent == 200
    report(
        f"C8 LOOCV properties (perfect clusters, no self-neighbour, "
        f"monotone abstention, {consistent}/200 label-collapse consistency)",
        ok,
    )


def test_c09_cosine_properties_on_10000_pairs():
    rng = np.random.default_rng(314159)
    ok = True
    checked = 0
    for trial in range(10000):
        dim = int(rng.integers(2, 128))
        u = rng.integers(0, 40, size=dim).astype(np.float64)
        v = rng.integers(0, 40, size=dim).astype(np.float64)
        if trial % 10 == 0:
            u[:] = 0.0
        c = cosine_values(u, v)
        ok &= c == cosine_values(v, u)
        ok &= 0.0 <= c <= 1.0
        if not u.any() or not v.any():
            ok &= c == 0.0
        else:
            scale = float(rng.uniform(1e-3, 1e3))
            ok &= abs(cosine_values(scale * u, v) - c) <= 1e-12
        checked += 1
        if not ok:
            break
    report(f"C9 cosine properties on {checked} random vector pairs", ok and checked == 10000)


def test_c10_end_to_end_determinism(tmp_path):
    started = time.monotonic()

    def pipeline(root: Path, jobs: int) -> dict[str, bytes]:
        root.mkdir()
        idx = root / "mini.idx"
        qvec = root / "q.vec"
        nvec = root / "n.vec"
        steps = [
            ["index", "build", "--corpus", str(SAMPLE / "corpus"),
             "--doc-mode", "blankline", "--out", str(idx)],
            ["vectors", "build", "--from-questions", str(SAMPLE / "questions.tsv"),
             "--index", str(idx), "--cache", str(root / "counts.cache"),
             "--jobs", str(jobs), "--out", str(qvec)],
            ["vectors", "build", "--from-nounmod", str(SAMPLE / "nounmod.tsv"),
             "--index", str(idx), "--cache", str(root / "counts.cache"),
             "--jobs", str(jobs), "--out", str(nvec)],
            ["analogy", "solve", "--questions", str(SAMPLE / "questions.tsv"),
             "--vectors", str(qvec), "--threshold", "0", "--seed", "0",
             "--jobs", str(jobs), "--out", str(root / "solve.csv")],
            ["analogy", "rank", "--questions", str(SAMPLE / "questions.tsv"),
             "--vectors", str(qvec), "--top-k", "10",
             "--out", str(root / "rank.csv"),
             "--summary-out", str(root / "rank_summary.csv")],
            ["nounmod", "classify", "--data", str(SAMPLE / "nounmod.tsv"),
             "--vectors", str(nvec), "--classes", "30", "--threshold", "0",
             "--seed", "0", "--out", str(root / "classify.csv"),
             "--per-class-out", str(root / "per_class.csv")],
            ["eval", "sweep", "--task", "analogy",
             "--questions", str(SAMPLE / "questions.tsv"), "--vectors", str(qvec),
             "--thresholds", "-0.11:0.11:0.01", "--seed", "0",
             "--out", str(root / "sweep.csv")],
        ]
        for step in steps:
            assert main(step) == 0, step
        return {
            name: (root / name).read_bytes()
            for name in (
                "mini.idx", "q.vec", "n.vec", "solve.csv", "rank.csv",
                "rank_summary.csv", "classify.csv", "per_class.csv", "sweep.csv",
            )
        }

    first = pipeline(tmp_path / "one", jobs=1)
    second = pipeline(tmp_path / "two", jobs=1)
    parallel = pipeline(tmp_path / "eight", jobs=8)
    elapsed = time.monotonic() - started

    identical_rerun = first == second
    identical_jobs = first == parallel
    report(
        f"C10 end-to-end determinism (rerun identical: {identical_rerun}, "
        f"jobs 1 vs 8 identical: {identical_jobs}, {elapsed:.1f}s)",
        identical_rerun and identical_jobs and elapsed < 60.0,
    )

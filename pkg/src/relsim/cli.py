"""Command-line entry point: file-based, reproducible experiment steps.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 provider or
cache error. Every output file is written atomically and gets a sidecar
`<output>.manifest.json` recording the command, config hashes, seed, and
tool version needed to reproduce it.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from ._util import atomic_write_text
from .analogy import (
    cumulative_rank_table,
    format_rank_table,
    gold_rank_experiment,
    read_questions,
    solve_all,
    summarize_results,
    sweep_evaluator,
)
from .corpus import DOC_MODES, read_corpus
from .errors import CacheError, DataFormatError, ProviderError, TermsMismatchError
from .index import CorpusIndex, build_index
from .metrics import ClassPrfTable, accuracy, per_class_prf, sweep
from .nounmod import (
    classify_from_neighbours,
    loocv_neighbours,
    read_labeled_pairs,
)
from .patterns import JoiningTermTable
from .vectors import CountCache, LocalIndexProvider, VectorStore, build_vector


def _pct(x: float) -> str:
    return f"{100 * x:.1f}%"


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    atomic_write_text(path, buf.getvalue())


def _write_manifest(out_path: str, ctx: click.Context, **config) -> None:
    manifest = {
        "tool": "relsim",
        "version": __version__,
        "command": ctx.obj.get("argv", []),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        **{k: v for k, v in config.items() if v is not None},
    }
    atomic_write_text(
        out_path + ".manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _load_terms(terms_path: str | None) -> JoiningTermTable:
    if terms_path:
        return JoiningTermTable.from_file(terms_path)
    return JoiningTermTable.default()


def _load_store(vectors_path: str, terms_path: str | None) -> VectorStore:
    store = VectorStore.load(vectors_path)
    if terms_path:
        table = JoiningTermTable.from_file(terms_path)
        if table.sha != store.table_sha:
            raise TermsMismatchError(table.sha, store.table_sha)
    return store


def _read_pairs_tsv(path: str) -> list[tuple[str, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot read pairs file {path}: {exc}") from exc
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) != 2 or not all(cols):
            raise DataFormatError(
                f"{path}:{lineno}: expected 2 tab-separated words"
            )
        pairs.append((cols[0].lower(), cols[1].lower()))
    if not pairs:
        raise DataFormatError(f"{path}: no pairs")
    return pairs


def _dedup(pairs: list[tuple[str, str]]) -> list[tuple[str, str]]:
    seen = set()
    out = []
    for pair in pairs:
        if pair not in seen:
            seen.add(pair)
            out.append(pair)
    return out


def _parse_thresholds(spec: str) -> list[float]:
    values: set[float] = set()
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            pieces = part.split(":")
            if len(pieces) != 3:
                raise click.BadParameter(f"range must be start:stop:step, got {part!r}")
            start, stop, step = (float(x) for x in pieces)
            if step <= 0:
                raise click.BadParameter(f"step must be positive in {part!r}")
            n = int(round((stop - start) / step))
            for i in range(n + 1):
                t = round(start + i * step, 10)
                if t <= stop + 1e-12:
                    values.add(t)
        else:
            values.add(float(part))
    if not values:
        raise click.BadParameter("no thresholds given")
    return sorted(values)


@click.group()
@click.version_option(__version__, prog_name="relsim")
@click.pass_context
def cli(ctx: click.Context):
    """Relational similarity over a local corpus: build an index, turn word
    pairs into phrase-frequency vectors, solve analogy questions, classify
    noun-modifier relations, and sweep precision/recall trade-offs.

    File formats: question files are TSV with 14 columns (id, stem pair,
    five choice pairs, gold index 0-4); noun-modifier datasets are TSV with
    3 columns (modifier, head, label); pair lists are TSV with 2 columns.
    '#' starts a comment in all of them. Output CSVs carry full-precision
    numbers; human summaries round percentages to one decimal.
    """
    ctx.ensure_object(dict)


@cli.group()
def index():
    """Corpus index operations."""


@index.command("build")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=False))
@click.option("--doc-mode", type=click.Choice(DOC_MODES), default="file", show_default=True,
              help="file: one document per file; blankline: blank-line-separated blocks.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def index_build(ctx, corpus_path, doc_mode, out_path):
    """Tokenize a corpus and write a positional index file."""
    docs = read_corpus(corpus_path, doc_mode)
    idx = build_index(iter(docs))
    idx.save(out_path)
    _write_manifest(out_path, ctx, index_fingerprint=idx.fingerprint, doc_mode=doc_mode)
    click.echo(f"indexed {idx.doc_count} documents, {idx.term_count} terms")
    click.echo(f"fingerprint {idx.fingerprint}")


@cli.group()
def vectors():
    """Relation-vector operations."""


@vectors.command("build")
@click.option("--pairs", "pairs_path", type=click.Path(), help="2-column TSV of word pairs.")
@click.option("--from-questions", "questions_path", type=click.Path(),
              help="Extract the six pairs of every question in a question TSV.")
@click.option("--from-nounmod", "nounmod_path", type=click.Path(),
              help="Extract (modifier, head) pairs from a labeled dataset TSV.")
@click.option("--index", "index_path", required=True, type=click.Path())
@click.option("--terms", "terms_path", type=click.Path(), help="Joining-term file (default: bundled 64-term table).")
@click.option("--cache", "cache_path", type=click.Path(), help="Persistent count cache file.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.pass_context
def vectors_build(ctx, pairs_path, questions_path, nounmod_path, index_path,
                  terms_path, cache_path, out_path, jobs):
    """Count the joining-term phrases for each pair and store raw counts."""
    sources = [p for p in (pairs_path, questions_path, nounmod_path) if p]
    if len(sources) != 1:
        raise click.UsageError(
            "exactly one of --pairs / --from-questions / --from-nounmod is required"
        )
    if pairs_path:
        pairs = _read_pairs_tsv(pairs_path)
    elif questions_path:
        pairs = [p for q in read_questions(questions_path) for p in q.pairs()]
    else:
        pairs = [lp.pair for lp in read_labeled_pairs(nounmod_path)]
    pairs = _dedup(pairs)

    table = _load_terms(terms_path)
    idx = CorpusIndex.load(index_path)
    provider = LocalIndexProvider(idx)
    if provider.max_in_flight is not None:
        jobs = min(jobs, provider.max_in_flight)
    cache = CountCache(cache_path) if cache_path else None
    try:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                vecs = list(pool.map(
                    lambda p: build_vector(p, table, provider, cache), pairs
                ))
        else:
            vecs = [build_vector(p, table, provider, cache) for p in pairs]
    finally:
        if cache is not None:
            cache.close()
    store = VectorStore(table.sha, vecs)
    store.save(out_path)
    _write_manifest(out_path, ctx, index_fingerprint=idx.fingerprint,
                    terms_sha=table.sha, jobs=jobs)
    click.echo(f"built {len(store)} vectors ({2 * len(table)} components each)")


@cli.group()
def analogy():
    """Analogy-question operations."""


@analogy.command("solve")
@click.option("--questions", "questions_path", required=True, type=click.Path())
@click.option("--vectors", "vectors_path", required=True, type=click.Path())
@click.option("--terms", "terms_path", type=click.Path(),
              help="Verify the vector store was built with this term file.")
@click.option("--threshold", type=float, default=0.0, show_default=True,
              help="Margin threshold: >0 skips close calls, <0 double-guesses them.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def analogy_solve(ctx, questions_path, vectors_path, terms_path, threshold, seed, jobs, out_path):
    """Pick the choice pair whose relation vector is most cosine-similar."""
    questions = read_questions(questions_path)
    store = _load_store(vectors_path, terms_path)
    results = solve_all(questions, store, threshold, seed, jobs)
    header = ["id", "kind", "guess1", "guess2", "margin", "gold", "correct",
              *(f"cos{i}" for i in range(5))]
    rows = []
    for res in results:
        d = res.decision
        rows.append([
            res.question.qid, d.kind,
            d.indices[0] if d.indices else None,
            d.indices[1] if len(d.indices) > 1 else None,
            d.margin, res.question.gold, int(res.correct), *res.cosines,
        ])
    _write_csv(out_path, header, rows)
    _write_manifest(out_path, ctx, terms_sha=store.table_sha, seed=seed,
                    threshold=threshold, jobs=jobs)
    record = summarize_results(results)
    skipped = sum(1 for r in results if r.decision.kind == "skip")
    click.echo(f"questions  {len(results)}")
    click.echo(f"correct    {record.correct}")
    click.echo(f"guesses    {record.guesses}")
    click.echo(f"skipped    {skipped}")
    click.echo(f"precision  {_pct(record.precision)}")
    click.echo(f"recall     {_pct(record.recall)}")
    click.echo(f"F          {_pct(record.f)}")


@analogy.command("rank")
@click.option("--questions", "questions_path", required=True, type=click.Path())
@click.option("--vectors", "vectors_path", required=True, type=click.Path())
@click.option("--terms", "terms_path", type=click.Path())
@click.option("--top-k", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--summary-out", "summary_path", type=click.Path(),
              help="Also write the cumulative rank histogram as CSV.")
@click.pass_context
def analogy_rank(ctx, questions_path, vectors_path, terms_path, top_k, out_path, summary_path):
    """Rank every question's gold pair within the pool of all gold pairs.

    Questions with an all-zero stem vector are dropped from the pool and
    the stem list.
    """
    questions = read_questions(questions_path)
    store = _load_store(vectors_path, terms_path)
    kept, rankings, gold_ranks = gold_rank_experiment(questions, store)
    pool_pairs = [q.choices[q.gold] for q in kept]
    header = ["id", "gold_rank", *(f"top{i + 1}" for i in range(top_k))]
    rows = []
    for question, order, rank in zip(kept, rankings, gold_ranks):
        top = [":".join(pool_pairs[j]) for j in order[:top_k]]
        top += [""] * (top_k - len(top))
        rows.append([question.qid, rank, *top])
    _write_csv(out_path, header, rows)
    _write_manifest(out_path, ctx, terms_sha=store.table_sha, top_k=top_k)
    table = cumulative_rank_table(gold_ranks, top_k)
    if summary_path:
        _write_csv(
            summary_path,
            ["rank", "matches", "matches_pct", "cumulative", "cumulative_pct"],
            [[r.rank, r.matches, r.matches_pct, r.cumulative, r.cumulative_pct] for r in table],
        )
        _write_manifest(summary_path, ctx, terms_sha=store.table_sha, top_k=top_k)
    click.echo(f"stems ranked  {len(kept)} (pool size {len(pool_pairs)})")
    click.echo(format_rank_table(table))


@cli.group()
def nounmod():
    """Noun-modifier classification operations."""


@nounmod.command("classify")
@click.option("--data", "data_path", required=True, type=click.Path())
@click.option("--vectors", "vectors_path", required=True, type=click.Path())
@click.option("--terms", "terms_path", type=click.Path())
@click.option("--classes", "class_level", type=click.Choice(["30", "5"]), default="30",
              show_default=True, help="Classify with fine labels or collapsed groups.")
@click.option("--threshold", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--per-class-out", "per_class_path", type=click.Path(),
              help="Also write the per-class precision/recall/F table.")
@click.pass_context
def nounmod_classify(ctx, data_path, vectors_path, terms_path, class_level,
                     threshold, seed, out_path, per_class_path):
    """Leave-one-out nearest-neighbour classification of labeled pairs."""
    items = read_labeled_pairs(data_path)
    store = _load_store(vectors_path, terms_path)
    vecs = [store.get(*item.pair) for item in items]
    gold = [item.label if class_level == "30" else item.group for item in items]
    outputs = classify_from_neighbours(loocv_neighbours(vecs, seed), gold, threshold)

    header = ["index", "modifier", "head", "gold", "kind", "label1", "label2", "margin", "correct"]
    rows = []
    for item, out in zip(items, outputs):
        rows.append([
            out.index, item.modifier, item.head, gold[out.index], out.kind,
            out.labels[0] if out.labels else None,
            out.labels[1] if len(out.labels) > 1 else None,
            out.margin,
            int(out.is_single and out.labels[0] == gold[out.index]),
        ])
    _write_csv(out_path, header, rows)
    _write_manifest(out_path, ctx, terms_sha=store.table_sha, seed=seed,
                    threshold=threshold, classes=class_level)

    table = per_class_prf(outputs, gold)
    if per_class_path:
        _write_per_class_csv(per_class_path, table)
        _write_manifest(per_class_path, ctx, terms_sha=store.table_sha, seed=seed,
                        threshold=threshold, classes=class_level)
    acc = accuracy(outputs, gold)
    abstained = sum(1 for o in outputs if o.kind == "abstain")
    doubled = sum(1 for o in outputs if o.kind == "double")
    click.echo(f"items      {len(items)}")
    click.echo(f"accuracy   {_pct(acc)}")
    click.echo(f"abstained  {abstained}")
    click.echo(f"double     {doubled}")
    click.echo(
        f"macro P/R/F  {_pct(table.precision)} {_pct(table.recall)} {_pct(table.f)}"
    )


def _write_per_class_csv(path: str, table: ClassPrfTable) -> None:
    rows = []
    for cls in table.classes:
        rec = table.per_class[cls]
        rows.append([cls, rec.possible, rec.precision, rec.recall, rec.f])
    rows.append(["AVERAGE", table.mean_size, table.precision, table.recall, table.f])
    _write_csv(path, ["class", "size", "precision", "recall", "f"], rows)


@cli.group(name="eval")
def eval_group():
    """Evaluation utilities."""


@eval_group.command("sweep")
@click.option("--task", type=click.Choice(["analogy", "nounmod"]), required=True)
@click.option("--questions", "questions_path", type=click.Path(),
              help="Question TSV (analogy task).")
@click.option("--data", "data_path", type=click.Path(),
              help="Labeled dataset TSV (nounmod task).")
@click.option("--vectors", "vectors_path", required=True, type=click.Path())
@click.option("--terms", "terms_path", type=click.Path())
@click.option("--classes", "class_level", type=click.Choice(["30", "5"]), default="30",
              show_default=True, help="Label granularity (nounmod task).")
@click.option("--thresholds", required=True,
              help="Comma-separated values and/or start:stop:step ranges, e.g. '-0.05:0.05:0.01'.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def eval_sweep(ctx, task, questions_path, data_path, vectors_path, terms_path,
               class_level, thresholds, seed, out_path):
    """Re-decide at each margin threshold and tabulate precision/recall/F.

    Cosines and neighbours are computed once; no counting is redone.
    """
    ts = _parse_thresholds(thresholds)
    store = _load_store(vectors_path, terms_path)
    if task == "analogy":
        if not questions_path:
            raise click.UsageError("--questions is required for --task analogy")
        evaluate = sweep_evaluator(read_questions(questions_path), store, seed)
    else:
        if not data_path:
            raise click.UsageError("--data is required for --task nounmod")
        items = read_labeled_pairs(data_path)
        vecs = [store.get(*item.pair) for item in items]
        gold = [item.label if class_level == "30" else item.group for item in items]
        folds = loocv_neighbours(vecs, seed)
        evaluate = lambda t: per_class_prf(classify_from_neighbours(folds, gold, t), gold)
    rows = sweep(evaluate, ts)
    _write_csv(out_path, ["threshold", "precision", "recall", "f"],
               [[r.threshold, r.precision, r.recall, r.f] for r in rows])
    _write_manifest(out_path, ctx, terms_sha=store.table_sha, seed=seed, task=task)
    click.echo(f"swept {len(rows)} thresholds from {rows[0].threshold} to {rows[-1].threshold}")


@cli.command("serve")
@click.option("--index", "index_path", required=True, type=click.Path())
@click.option("--terms", "terms_path", type=click.Path())
@click.option("--cache", "cache_path", type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(index_path, terms_path, cache_path, host, port):
    """Run the HTTP service wrapping the same operations."""
    import uvicorn

    from .service.app import create_app

    app = create_app(index_path, terms_path=terms_path, cache_path=cache_path)
    uvicorn.run(app, host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    """Run the CLI, mapping error classes to exit codes."""
    args = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        cli.main(args=args, prog_name="relsim", standalone_mode=False, obj={"argv": args})
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as exc:
        exc.show()
        return 1
    except (ProviderError, CacheError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except DataFormatError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

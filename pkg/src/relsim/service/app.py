"""FastAPI app wrapping the core operations over a loaded corpus index.

The service is read-only with respect to the index; vectors are built on
demand through the local count provider (optionally backed by a persistent
count cache shared with the CLI).
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analogy import decide, question_rng, rank_candidates, score_choices
from ..errors import DataFormatError, RelsimError
from ..index import CorpusIndex
from ..metrics import accuracy, per_class_prf
from ..nounmod import classify_from_neighbours, collapse_class, loocv_neighbours
from ..patterns import JoiningTermTable, generate_queries, parse_pattern, stem
from ..vectors import (
    CountCache,
    LocalIndexProvider,
    RelationVector,
    build_vector,
    cosine,
)
from .schemas import (
    ClassifyRequest,
    ClassifyResponse,
    ClassifySummary,
    CosineRequest,
    CosineResponse,
    CountRequest,
    CountResponse,
    DecisionModel,
    InfoResponse,
    ItemOutput,
    QueriesResponse,
    RankedCandidate,
    RankRequest,
    RankResponse,
    SolveRequest,
    SolveResponse,
    StemRequest,
    StemResponse,
    VectorResponse,
    WordPair,
)


def create_app(
    index_path: str,
    terms_path: str | None = None,
    cache_path: str | None = None,
) -> FastAPI:
    index = CorpusIndex.load(index_path)
    table = (
        JoiningTermTable.from_file(terms_path) if terms_path else JoiningTermTable.default()
    )
    provider = LocalIndexProvider(index)
    cache = CountCache(cache_path) if cache_path else None

    app = FastAPI(title="relsim", version=__version__)

    def pair_vector(pair: WordPair) -> RelationVector:
        return build_vector((pair.x.lower(), pair.y.lower()), table, provider, cache)

    @app.exception_handler(DataFormatError)
    async def data_error(request: Request, exc: DataFormatError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(RelsimError)
    async def internal_error(request: Request, exc: RelsimError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/info", response_model=InfoResponse)
    def info():
        return InfoResponse(
            version=__version__,
            index_fingerprint=index.fingerprint,
            doc_count=index.doc_count,
            term_count=index.term_count,
            tokenizer_version=index.tokenizer_version,
            table_sha=table.sha,
            table_size=len(table),
        )

    @app.post("/count", response_model=CountResponse)
    def count(req: CountRequest):
        query = " ".join(req.query.lower().split())
        hits = cache.get(provider.identity, query) if cache is not None else None
        if hits is None:
            hits = index.count_documents(parse_pattern(query))
            if cache is not None:
                cache.put(provider.identity, query, hits)
        return CountResponse(query=req.query, count=hits)

    @app.post("/stem", response_model=StemResponse)
    def stem_word(req: StemRequest):
        result = stem(req.word.lower())
        return StemResponse(original=result.original, stemmed=result.stemmed)

    @app.post("/queries", response_model=QueriesResponse)
    def queries(pair: WordPair):
        qp = generate_queries((pair.x.lower(), pair.y.lower()), table)
        return QueriesResponse(x=qp.x, y=qp.y, queries=list(qp.queries))

    @app.post("/vector", response_model=VectorResponse)
    def vector(pair: WordPair):
        vec = pair_vector(pair)
        return VectorResponse(
            x=vec.x,
            y=vec.y,
            raw_counts=list(vec.raw_counts),
            components=[float(c) for c in vec.components],
            zero=vec.is_zero,
        )

    @app.post("/cosine", response_model=CosineResponse)
    def cosine_endpoint(req: CosineRequest):
        return CosineResponse(cosine=cosine(pair_vector(req.a), pair_vector(req.b)))

    @app.post("/analogy/solve", response_model=SolveResponse)
    def solve(req: SolveRequest):
        stem_vec = pair_vector(req.stem)
        cosines = score_choices(stem_vec, [pair_vector(c) for c in req.choices])
        decision = decide(
            cosines,
            stem_vec.is_zero,
            req.threshold,
            question_rng(req.seed, req.question_id),
        )
        return SolveResponse(
            question_id=req.question_id,
            cosines=cosines,
            decision=DecisionModel(
                kind=decision.kind, indices=list(decision.indices), margin=decision.margin
            ),
        )

    @app.post("/analogy/rank", response_model=RankResponse)
    def rank(req: RankRequest):
        stem_vec = pair_vector(req.stem)
        pool = [pair_vector(p) for p in req.pool]
        order = rank_candidates(stem_vec, pool)
        if req.top_k is not None:
            order = order[: req.top_k]
        return RankResponse(
            ranking=[
                RankedCandidate(
                    index=i, x=pool[i].x, y=pool[i].y, cosine=cosine(stem_vec, pool[i])
                )
                for i in order
            ]
        )

    @app.post("/nounmod/classify", response_model=ClassifyResponse)
    def classify(req: ClassifyRequest):
        vecs = [pair_vector(WordPair(x=item.modifier, y=item.head)) for item in req.items]
        if req.class_level == "30":
            gold = [item.label for item in req.items]
            for label in gold:
                collapse_class(label)  # vocabulary check
        else:
            gold = [collapse_class(item.label) for item in req.items]
        outputs = classify_from_neighbours(
            loocv_neighbours(vecs, req.seed), gold, req.threshold
        )
        table_prf = per_class_prf(outputs, gold)
        return ClassifyResponse(
            outputs=[
                ItemOutput(
                    index=o.index,
                    kind=o.kind,
                    labels=list(o.labels),
                    margin=o.margin,
                    gold=gold[o.index],
                    correct=bool(o.is_single and o.labels[0] == gold[o.index]),
                )
                for o in outputs
            ],
            summary=ClassifySummary(
                accuracy=accuracy(outputs, gold),
                precision=table_prf.precision,
                recall=table_prf.recall,
                f=table_prf.f,
            ),
        )

    return app

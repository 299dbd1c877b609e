"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class WordPair(BaseModel):
    x: str = Field(min_length=1)
    y: str = Field(min_length=1)


class InfoResponse(BaseModel):
    version: str
    index_fingerprint: str
    doc_count: int
    term_count: int
    tokenizer_version: str
    table_sha: str
    table_size: int


class CountRequest(BaseModel):
    query: str = Field(min_length=1)


class CountResponse(BaseModel):
    query: str
    count: int


class StemRequest(BaseModel):
    word: str = Field(min_length=1)


class StemResponse(BaseModel):
    original: str
    stemmed: str


class QueriesResponse(BaseModel):
    x: str
    y: str
    queries: list[str]


class VectorResponse(BaseModel):
    x: str
    y: str
    raw_counts: list[int]
    components: list[float]
    zero: bool


class CosineRequest(BaseModel):
    a: WordPair
    b: WordPair


class CosineResponse(BaseModel):
    cosine: float


class DecisionModel(BaseModel):
    kind: Literal["skip", "guess", "double"]
    indices: list[int]
    margin: Optional[float] = None


class SolveRequest(BaseModel):
    question_id: str = "q"
    stem: WordPair
    choices: list[WordPair] = Field(min_length=5, max_length=5)
    threshold: float = 0.0
    seed: int = 0


class SolveResponse(BaseModel):
    question_id: str
    cosines: list[float]
    decision: DecisionModel


class RankRequest(BaseModel):
    stem: WordPair
    pool: list[WordPair] = Field(min_length=1)
    top_k: Optional[int] = Field(default=None, ge=1)


class RankedCandidate(BaseModel):
    index: int
    x: str
    y: str
    cosine: float


class RankResponse(BaseModel):
    ranking: list[RankedCandidate]


class LabeledItem(BaseModel):
    modifier: str = Field(min_length=1)
    head: str = Field(min_length=1)
    label: str = Field(min_length=1)


class ClassifyRequest(BaseModel):
    items: list[LabeledItem] = Field(min_length=3)
    class_level: Literal["30", "5"] = "30"
    threshold: float = 0.0
    seed: int = 0


class ItemOutput(BaseModel):
    index: int
    kind: Literal["abstain", "single", "double"]
    labels: list[str]
    margin: float
    gold: str
    correct: bool


class ClassifySummary(BaseModel):
    accuracy: float
    precision: float
    recall: float
    f: float


class ClassifyResponse(BaseModel):
    outputs: list[ItemOutput]
    summary: ClassifySummary

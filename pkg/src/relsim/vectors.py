"""Relation vectors: phrase hit counts per word pair, log-transformed.

Counts come from a CountProvider (the bundled one runs against a local
CorpusIndex; a remote hit-count service would implement the same contract
with its own identity, courtesy delay, and in-flight limit). Counts are
memoized in an append-only on-disk cache keyed by provider identity, so
re-running an experiment never re-queries.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, runtime_checkable

import numpy as np

from ._util import atomic_write_text, sha256_text
from .errors import CacheError, DataFormatError, ProviderError, TermsMismatchError
from .index import CorpusIndex
from .patterns import JoiningTermTable, generate_queries, parse_pattern

STORE_MAGIC = "RSVEC1"


@runtime_checkable
class CountProvider(Protocol):
    """Answers document-frequency queries for query texts.

    identity: stable string naming the underlying corpus snapshot (cache
    key component). delay_ms: courtesy pause before each live query.
    max_in_flight: concurrent-query cap (None = unlimited).
    """

    identity: str
    delay_ms: int
    max_in_flight: int | None

    def get_count(self, query_text: str) -> int: ...


class LocalIndexProvider:
    """Counts against a local CorpusIndex; no delay, no in-flight limit."""

    def __init__(self, index: CorpusIndex):
        self._index = index
        self.identity = f"relsim-index:{index.fingerprint}"
        self.delay_ms = 0
        self.max_in_flight: int | None = None

    def get_count(self, query_text: str) -> int:
        return self._index.count_documents(parse_pattern(query_text))


class CountCache:
    """Persistent query-count map: one UTF-8 line per entry, append-only.

    Line format: sha256(provider identity) TAB query text TAB count. The
    last entry for a key wins, so a rewrite is just another append. A
    truncated final line (crash mid-append) is ignored on load; anything
    else malformed raises. Writes are serialized; reads are lock-free.
    """

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], int] = {}
        self._load()
        self._path.parent.mkdir(parents=True, exist_ok=True)
        try:
            self._fh = open(self._path, "a", encoding="utf-8")
        except OSError as exc:
            raise CacheError(f"cannot open cache file {self._path}: {exc}") from exc

    def _load(self) -> None:
        if not self._path.exists():
            return
        try:
            raw = self._path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise CacheError(f"cannot read cache file {self._path}: {exc}") from exc
        lines = raw.split("\n")
        # A clean file ends with "\n" so the final split element is "";
        # a crash mid-append leaves a partial final element, dropped here.
        for lineno, line in enumerate(lines[:-1], start=1):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not parts[2].isdigit():
                raise CacheError(f"{self._path}:{lineno}: malformed cache line")
            self._entries[(parts[0], parts[1])] = int(parts[2])

    @staticmethod
    def _key(provider_identity: str, query: str) -> tuple[str, str]:
        return sha256_text(provider_identity), query

    def get(self, provider_identity: str, query: str) -> int | None:
        return self._entries.get(self._key(provider_identity, query))

    def put(self, provider_identity: str, query: str, count: int) -> None:
        if "\t" in query or "\n" in query:
            raise CacheError(f"query text not cacheable: {query!r}")
        key = self._key(provider_identity, query)
        with self._lock:
            try:
                self._fh.write(f"{key[0]}\t{query}\t{count}\n")
                self._fh.flush()
            except OSError as exc:
                raise CacheError(f"cannot write cache file {self._path}: {exc}") from exc
            self._entries[key] = count

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "CountCache":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass(frozen=True, eq=False)
class RelationVector:
    """A word pair's raw hit counts plus their log(count+1) components."""

    x: str
    y: str
    raw_counts: tuple[int, ...]
    table_sha: str
    components: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if any(c < 0 for c in self.raw_counts):
            raise DataFormatError(f"negative hit count for pair {self.x}:{self.y}")
        comp = np.log1p(np.asarray(self.raw_counts, dtype=np.float64))
        comp.setflags(write=False)
        object.__setattr__(self, "components", comp)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.x, self.y)

    @property
    def is_zero(self) -> bool:
        return not any(self.raw_counts)


def build_vector(
    pair: tuple[str, str],
    table: JoiningTermTable,
    provider: CountProvider,
    cache: CountCache | None = None,
) -> RelationVector:
    """Fetch the counts for every query of a pair, cache-first."""
    query_pair = generate_queries(pair, table)
    counts: list[int] = []
    for query in query_pair.queries:
        count = cache.get(provider.identity, query) if cache is not None else None
        if count is None:
            if provider.delay_ms:
                time.sleep(provider.delay_ms / 1000.0)
            try:
                count = provider.get_count(query)
            except Exception as exc:
                raise ProviderError(query, exc) from exc
            if not isinstance(count, int) or count < 0:
                raise ProviderError(query, ValueError(f"bad count {count!r}"))
            if cache is not None:
                cache.put(provider.identity, query, count)
        counts.append(count)
    return RelationVector(query_pair.x, query_pair.y, tuple(counts), table.sha)


def cosine_values(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between two component arrays; 0 if either is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    denom = math.sqrt(float(u @ u)) * math.sqrt(float(v @ v))
    if denom == 0.0:
        return 0.0
    value = float(u @ v) / denom
    # Non-negative components put the true value in [0, 1]; rounding can
    # overshoot by ~1e-16, which the contract does not allow.
    return min(max(value, 0.0), 1.0)


def cosine(a: RelationVector, b: RelationVector) -> float:
    return cosine_values(a.components, b.components)


class VectorStore:
    """On-disk pair->counts map tied to one joining-term table.

    Text format: first line "RSVEC1 <table sha>", then one line per pair:
    x TAB y TAB space-separated raw counts. Only raw counts are stored, so
    the log transform can change without re-querying anything.
    """

    def __init__(self, table_sha: str, vectors: Iterable[RelationVector] = ()):
        self.table_sha = table_sha
        self._by_pair: dict[tuple[str, str], RelationVector] = {}
        for vec in vectors:
            self.add(vec)

    def add(self, vec: RelationVector) -> None:
        if vec.table_sha != self.table_sha:
            raise TermsMismatchError(self.table_sha, vec.table_sha)
        self._by_pair[vec.pair] = vec

    def get(self, x: str, y: str) -> RelationVector:
        try:
            return self._by_pair[(x, y)]
        except KeyError:
            raise DataFormatError(f"no vector for pair {x}:{y} in store") from None

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self._by_pair

    def __len__(self) -> int:
        return len(self._by_pair)

    def vectors(self) -> list[RelationVector]:
        return list(self._by_pair.values())

    def save(self, path: str | Path) -> None:
        lines = [f"{STORE_MAGIC} {self.table_sha}"]
        for (x, y), vec in self._by_pair.items():
            lines.append(f"{x}\t{y}\t{' '.join(str(c) for c in vec.raw_counts)}")
        atomic_write_text(path, "\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "VectorStore":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise DataFormatError(f"cannot read vector store {path}: {exc}") from exc
        lines = text.splitlines()
        if not lines or not lines[0].startswith(STORE_MAGIC + " "):
            raise DataFormatError(f"{path}: not a {STORE_MAGIC} vector store")
        table_sha = lines[0].split(" ", 1)[1].strip()
        store = cls(table_sha)
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataFormatError(f"{path}:{lineno}: expected 3 tab-separated fields")
            try:
                counts = tuple(int(c) for c in parts[2].split())
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: bad count list") from exc
            store.add(RelationVector(parts[0], parts[1], counts, table_sha))
        return store

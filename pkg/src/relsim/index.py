"""Positional inverted index answering document-frequency phrase queries.

A query pattern matches a document when the document contains at least one
contiguous token run matching the pattern; each document counts once no
matter how many runs match (document frequency). Matching works off the
anchor tokens only: token positions are dense, so once the first and last
pattern tokens (never wildcards, by grammar) line up, every any-word slot
in between is automatically occupied by exactly one token.
"""

from __future__ import annotations

import hashlib
import json
import struct
from bisect import bisect_left
from pathlib import Path
from typing import Iterable, Iterator

from ._util import atomic_write_bytes
from .corpus import Document
from .errors import IndexFormatError, IngestError
from .patterns import AnyWord, Literal, PhrasePattern, Prefix
from .tokenizer import TOKENIZER_VERSION

MAGIC = b"RSIDX1"


class CorpusIndex:
    """Immutable after build; safe for unrestricted concurrent readers."""

    def __init__(
        self,
        doc_count: int,
        postings: dict[str, list[tuple[int, int]]],
        fingerprint: str,
    ):
        self.doc_count = doc_count
        self.fingerprint = fingerprint
        self.tokenizer_version = TOKENIZER_VERSION
        self._postings = postings
        self._terms = sorted(postings)

    @property
    def term_count(self) -> int:
        return len(self._terms)

    def postings(self, term: str) -> list[tuple[int, int]]:
        return self._postings.get(term, [])

    def expand(self, token: Literal | Prefix) -> Iterator[str]:
        """Dictionary terms a pattern token can match."""
        if isinstance(token, Literal):
            if token.text in self._postings:
                yield token.text
            return
        i = bisect_left(self._terms, token.stem)
        while i < len(self._terms) and self._terms[i].startswith(token.stem):
            if len(self._terms[i]) - len(token.stem) <= token.max_extra:
                yield self._terms[i]
            i += 1

    def count_documents(self, pattern: PhrasePattern) -> int:
        """Number of distinct documents with at least one pattern match."""
        anchor_sets: list[set[tuple[int, int]]] = []
        for offset, token in enumerate(pattern.tokens):
            if isinstance(token, AnyWord):
                continue
            starts = set()
            for term in self.expand(token):
                for doc_id, pos in self._postings[term]:
                    if pos >= offset:
                        starts.add((doc_id, pos - offset))
            if not starts:
                return 0
            anchor_sets.append(starts)
        matches = set.intersection(*anchor_sets)
        return len({doc_id for doc_id, _ in matches})

    def save(self, path: str | Path) -> None:
        header = json.dumps(
            {
                "doc_count": self.doc_count,
                "fingerprint": self.fingerprint,
                "term_count": self.term_count,
                "tokenizer_version": self.tokenizer_version,
            },
            sort_keys=True,
            separators=(",", ":"),
        ).encode("utf-8")
        chunks = [MAGIC, struct.pack(">I", len(header)), header]
        for term in self._terms:
            tb = term.encode("utf-8")
            plist = self._postings[term]
            chunks.append(struct.pack(">HI", len(tb), len(plist)))
            chunks.append(tb)
            chunks.append(b"".join(struct.pack(">II", d, p) for d, p in plist))
        atomic_write_bytes(path, b"".join(chunks))

    @classmethod
    def load(cls, path: str | Path) -> "CorpusIndex":
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise IndexFormatError(f"cannot read index file {path}: {exc}") from exc
        if data[: len(MAGIC)] != MAGIC:
            raise IndexFormatError(
                f"{path}: not a {MAGIC.decode()} index file "
                f"(found header {data[:len(MAGIC)]!r})"
            )
        off = len(MAGIC)
        try:
            (header_len,) = struct.unpack_from(">I", data, off)
            off += 4
            header = json.loads(data[off : off + header_len].decode("utf-8"))
            off += header_len
            if header["tokenizer_version"] != TOKENIZER_VERSION:
                raise IndexFormatError(
                    f"{path}: tokenizer version mismatch "
                    f"(file {header['tokenizer_version']!r}, "
                    f"current {TOKENIZER_VERSION!r})"
                )
            postings: dict[str, list[tuple[int, int]]] = {}
            for _ in range(header["term_count"]):
                term_len, n = struct.unpack_from(">HI", data, off)
                off += 6
                term = data[off : off + term_len].decode("utf-8")
                off += term_len
                plist = []
                for _ in range(n):
                    d, p = struct.unpack_from(">II", data, off)
                    off += 8
                    plist.append((d, p))
                postings[term] = plist
        except (struct.error, KeyError, ValueError, UnicodeDecodeError) as exc:
            raise IndexFormatError(f"{path}: corrupt index file ({exc})") from exc
        return cls(header["doc_count"], postings, header["fingerprint"])


def build_index(docs: Iterable[Document]) -> CorpusIndex:
    """Build the index; identical corpora yield byte-identical saved files."""
    digest = hashlib.sha256()
    digest.update(f"relsim-tokenizer-{TOKENIZER_VERSION}".encode("utf-8"))
    postings: dict[str, list[tuple[int, int]]] = {}
    doc_count = 0
    for doc in docs:
        if doc.doc_id != doc_count:
            raise IngestError(
                f"document ids must be dense: expected {doc_count}, got {doc.doc_id}"
            )
        digest.update(b"\x1d")
        for pos, token in enumerate(doc.tokens):
            digest.update(token.encode("utf-8"))
            digest.update(b"\x1e")
            postings.setdefault(token, []).append((doc.doc_id, pos))
        doc_count += 1
    if doc_count == 0:
        raise IngestError("empty corpus: no documents to index")
    return CorpusIndex(doc_count, postings, digest.hexdigest())


def count_documents(index: CorpusIndex, pattern: PhrasePattern) -> int:
    return index.count_documents(pattern)

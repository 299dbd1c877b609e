"""Local corpus ingestion: files in, tokenized documents out."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import IngestError
from .tokenizer import tokenize

DOC_MODES = ("file", "blankline")


@dataclass(frozen=True)
class Document:
    """One unit counted as a single hit. Ids are dense, 0..N-1."""

    doc_id: int
    tokens: tuple[str, ...]


def _source_files(source: str | Path) -> list[Path]:
    root = Path(source)
    if not root.exists():
        raise IngestError(f"unreadable path: {root}")
    if root.is_file():
        return [root]
    files = sorted(p for p in root.rglob("*") if p.is_file())
    if not files:
        raise IngestError(f"empty corpus: no files under {root}")
    return files


def _read_text(path: Path) -> str:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IngestError(f"unreadable path: {path} ({exc})") from exc
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestError(
            f"malformed UTF-8 in {path} at byte offset {exc.start}"
        ) from exc


def iter_documents(source: str | Path, mode: str = "file") -> Iterator[Document]:
    """Yield documents from a file or directory tree.

    mode "file": each file is one document. mode "blankline": each file is
    split into documents on blank lines. Files are visited in sorted path
    order so ingestion is deterministic.
    """
    if mode not in DOC_MODES:
        raise ValueError(f"unknown doc mode: {mode!r}")
    doc_id = 0
    for path in _source_files(source):
        text = _read_text(path)
        if mode == "file":
            yield Document(doc_id, tuple(tokenize(text)))
            doc_id += 1
        else:
            for block in _split_blocks(text):
                yield Document(doc_id, tuple(tokenize(block)))
                doc_id += 1


def _split_blocks(text: str) -> Iterator[str]:
    block: list[str] = []
    for line in text.splitlines():
        if line.strip():
            block.append(line)
        elif block:
            yield "\n".join(block)
            block = []
    if block:
        yield "\n".join(block)


def read_corpus(source: str | Path, mode: str = "file") -> list[Document]:
    """Materialize the document stream; an empty corpus is an error."""
    docs = list(iter_documents(source, mode))
    if not docs:
        raise IngestError(f"empty corpus: {source}")
    return docs

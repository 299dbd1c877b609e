"""Phrase-pattern grammar, word stemming, and query generation.

A query is a space-separated string like "restrai* * very limit*". Parsed
form: a standalone "*" matches any one whole token; a token ending in "*"
matches tokens that start with the stem plus zero to five extra characters;
anything else is a literal token. The stem before a trailing "*" needs at
least three alphabetic characters, and "*" may not be the first or last
token of a phrase.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Union

from ._util import sha256_text
from .errors import DataFormatError, InvalidPatternError

PREFIX_MAX_EXTRA = 5


@dataclass(frozen=True)
class Literal:
    text: str

    def __post_init__(self):
        if not self.text or any(c.isspace() for c in self.text):
            raise InvalidPatternError(f"bad literal token: {self.text!r}")


@dataclass(frozen=True)
class AnyWord:
    """Matches exactly one whole token."""


@dataclass(frozen=True)
class Prefix:
    stem: str
    max_extra: int = PREFIX_MAX_EXTRA

    def __post_init__(self):
        alpha = sum(1 for c in self.stem if c.isalpha())
        if alpha < 3:
            raise InvalidPatternError(
                f"prefix stem needs at least 3 alphabetic characters: {self.stem!r}*"
            )


PatternToken = Union[Literal, AnyWord, Prefix]

ANY_WORD = AnyWord()


@dataclass(frozen=True)
class PhrasePattern:
    tokens: tuple[PatternToken, ...]

    def __post_init__(self):
        if not self.tokens:
            raise InvalidPatternError("empty pattern")
        if isinstance(self.tokens[0], AnyWord) or isinstance(self.tokens[-1], AnyWord):
            raise InvalidPatternError(
                "'*' must not be the first or last token of a phrase"
            )

    def __len__(self) -> int:
        return len(self.tokens)


def parse_pattern(query_text: str) -> PhrasePattern:
    """Parse query text into a PhrasePattern; matching is case-insensitive."""
    parsed: list[PatternToken] = []
    for raw in query_text.split():
        token = raw.lower()
        if token == "*":
            parsed.append(ANY_WORD)
        elif token.endswith("*"):
            stem_text = token[:-1]
            if "*" in stem_text:
                raise InvalidPatternError(
                    f"asterisk allowed only at the end of a token: {raw!r}"
                )
            parsed.append(Prefix(stem_text))
        elif "*" in token:
            raise InvalidPatternError(
                f"asterisk allowed only at the end of a token: {raw!r}"
            )
        else:
            parsed.append(Literal(token))
    return PhrasePattern(tuple(parsed))


@dataclass(frozen=True)
class StemmedWord:
    original: str
    stemmed: str


def stem(word: str) -> StemmedWord:
    """Truncate a word by length class and mark it as a prefix query.

    Length > 10: last 4 characters become "*". Length 9-10: last 3 become
    "*". Length 3-8: "*" is appended. Length <= 2: unchanged.
    """
    if not word or any(c.isspace() for c in word):
        raise DataFormatError(f"not a single word: {word!r}")
    n = len(word)
    if n > 10:
        stemmed = word[:-4] + "*"
    elif n > 8:
        stemmed = word[:-3] + "*"
    elif n > 2:
        stemmed = word + "*"
    else:
        stemmed = word
    return StemmedWord(word, stemmed)


@dataclass(frozen=True)
class JoiningTermTable:
    """Ordered connective phrases; order fixes vector component order.

    The table hash ties vectors, vector stores, and cache entries to the
    exact term list they were built from.
    """

    terms: tuple[str, ...]
    sha: str = field(init=False)

    def __post_init__(self):
        if not self.terms:
            raise DataFormatError("joining-term table is empty")
        object.__setattr__(self, "sha", sha256_text("\n".join(self.terms)))

    def __len__(self) -> int:
        return len(self.terms)

    @classmethod
    def from_lines(cls, lines: list[str]) -> "JoiningTermTable":
        terms = []
        for line in lines:
            stripped = line.strip()
            if stripped.startswith("#"):
                continue
            terms.append(stripped)
        return cls(tuple(terms))

    @classmethod
    def from_file(cls, path: str | Path) -> "JoiningTermTable":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataFormatError(f"cannot read joining-term file {path}: {exc}") from exc
        return cls.from_lines(text.splitlines())

    @classmethod
    def default(cls) -> "JoiningTermTable":
        text = resources.files("relsim.data").joinpath("joining_terms.txt").read_text("utf-8")
        return cls.from_lines(text.splitlines())


@dataclass(frozen=True)
class QueryPair:
    """The query texts for one word pair, in canonical component order.

    For term i (0-based) the forward phrase "stem(x) term stem(y)" sits at
    position 2i and the reversed phrase at 2i+1. Everything downstream
    (cache keys, vector components, stored counts) relies on this order.
    """

    x: str
    y: str
    queries: tuple[str, ...]


def generate_queries(pair: tuple[str, str], table: JoiningTermTable) -> QueryPair:
    """Build the 2x|table| phrase queries for a word pair."""
    x, y = pair
    sx = stem(x).stemmed
    sy = stem(y).stemmed
    queries: list[str] = []
    for term in table.terms:
        if term:
            queries.append(f"{sx} {term} {sy}")
            queries.append(f"{sy} {term} {sx}")
        else:
            queries.append(f"{sx} {sy}")
            queries.append(f"{sy} {sx}")
    return QueryPair(x, y, tuple(queries))

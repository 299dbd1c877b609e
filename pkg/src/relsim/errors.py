"""Exception hierarchy.

Data/format problems and provider/cache problems are kept on separate
branches because the CLI maps them to different exit codes (2 and 3).
"""


class RelsimError(Exception):
    """Base class for all errors raised by this package."""


class DataFormatError(RelsimError):
    """Malformed or inconsistent input data (files, labels, hashes)."""


class IngestError(DataFormatError):
    """Corpus ingestion failed (unreadable path, bad encoding, empty corpus)."""


class IndexFormatError(DataFormatError):
    """Index file is not readable by this version of the package."""


class InvalidPatternError(DataFormatError):
    """Query text violates the phrase-pattern grammar."""


class UnknownLabelError(DataFormatError):
    """A class label is outside the known vocabulary."""


class TermsMismatchError(DataFormatError):
    """Vectors built against different joining-term tables were mixed."""

    def __init__(self, expected: str, found: str):
        super().__init__(
            f"joining-term table hash mismatch: expected {expected}, found {found}"
        )
        self.expected = expected
        self.found = found


class ProviderError(RelsimError):
    """A count provider failed; carries the query that triggered it."""

    def __init__(self, query: str, cause: Exception | None = None):
        detail = f": {cause}" if cause is not None else ""
        super().__init__(f"count provider failed for query {query!r}{detail}")
        self.query = query


class CacheError(RelsimError):
    """The persistent count cache could not be read or written."""

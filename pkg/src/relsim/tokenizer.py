"""Corpus tokenizer.

Rules, applied to lowercased text:

* maximal runs of letters/digits form tokens ("six-hour" splits at the
  hyphen, as does every other punctuation character);
* an ASCII apostrophe followed by a lone "s" is emitted as the token "'s"
  immediately after its host word ("john's" -> ["john", "'s"]), so that
  possessive phrase queries stay expressible as token sequences;
* everything else separates tokens.

TOKENIZER_VERSION participates in the corpus fingerprint; bump it whenever
the rules above change, so stale indexes and caches are refused instead of
silently answering with different counts.
"""

from __future__ import annotations

import re

TOKENIZER_VERSION = "1"

# Branch order matters: the "'s" branch must win before the plain run
# branch can start a token at the "s".
_TOKEN_RE = re.compile(r"(?<=[^\W_])'s(?![^\W_])|[^\W_]+")


def tokenize(raw_text: str) -> list[str]:
    """Split raw text into lowercase tokens."""
    return _TOKEN_RE.findall(raw_text.lower())

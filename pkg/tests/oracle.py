"""Independent brute-force reference implementations used as test oracles.

Deliberately dumb: scan every window of every document and compare token
by token. Nothing here shares code with the index under test.
"""

from __future__ import annotations

import random

from relsim.patterns import AnyWord, Literal, PhrasePattern, Prefix


def token_matches(pattern_token, word: str) -> bool:
    if isinstance(pattern_token, AnyWord):
        return True
    if isinstance(pattern_token, Literal):
        return word == pattern_token.text
    return (
        word.startswith(pattern_token.stem)
        and len(word) - len(pattern_token.stem) <= pattern_token.max_extra
    )


def naive_count(doc_token_lists, pattern: PhrasePattern) -> int:
    """Documents with at least one contiguous window matching the pattern."""
    n = len(pattern.tokens)
    hits = 0
    for tokens in doc_token_lists:
        matched = False
        for start in range(len(tokens) - n + 1):
            if all(
                token_matches(pt, tokens[start + j])
                for j, pt in enumerate(pattern.tokens)
            ):
                matched = True
                break
        hits += matched
    return hits


VOCAB_ALPHABET = "abcde"


def random_word(rng: random.Random, min_len: int = 1, max_len: int = 6) -> str:
    return "".join(
        rng.choice(VOCAB_ALPHABET) for _ in range(rng.randint(min_len, max_len))
    )


def random_corpus(
    rng: random.Random, max_docs: int, max_tokens: int = 20
) -> list[list[str]]:
    n_docs = rng.randint(1, max_docs)
    return [
        [random_word(rng) for _ in range(rng.randint(0, max_tokens))]
        for _ in range(n_docs)
    ]


def random_pattern(rng: random.Random, corpus: list[list[str]]) -> PhrasePattern:
    """Random 1-4 token pattern biased toward words that occur in the corpus."""
    vocab = sorted({w for doc in corpus for w in doc})
    length = rng.randint(1, 4)

    def pick_word() -> str:
        if vocab and rng.random() < 0.8:
            return rng.choice(vocab)
        return random_word(rng)

    tokens = []
    for position in range(length):
        at_edge = position in (0, length - 1)
        roll = rng.random()
        if roll < 0.25 and not at_edge:
            tokens.append(AnyWord())
        elif roll < 0.55:
            base = pick_word()
            if len(base) < 3:
                base = base + "".join(rng.choice(VOCAB_ALPHABET) for _ in range(3))
            stem = base[: rng.randint(3, len(base))]
            tokens.append(Prefix(stem))
        else:
            tokens.append(Literal(pick_word()))
    return PhrasePattern(tuple(tokens))

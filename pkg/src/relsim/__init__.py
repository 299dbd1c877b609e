"""Corpus-backed relational similarity toolkit.

Builds relation vectors for word pairs from wildcard phrase frequencies in
a local corpus, solves multiple-choice analogy questions by cosine
similarity with a margin-based skip/double-guess rule, and classifies
noun-modifier pairs with a leave-one-out nearest-neighbour vote.
"""

__version__ = "0.1.0"

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from relsim.corpus import Document
from relsim.index import build_index

SAMPLE_DATA = Path(__file__).parent.parent / "sample_data"


def docs_from_token_lists(token_lists) -> list[Document]:
    return [Document(i, tuple(tokens)) for i, tokens in enumerate(token_lists)]


def index_from_token_lists(token_lists):
    return build_index(iter(docs_from_token_lists(token_lists)))


@pytest.fixture(scope="session")
def sample_index():
    from relsim.corpus import read_corpus

    return build_index(iter(read_corpus(SAMPLE_DATA / "corpus", "blankline")))


@pytest.fixture(scope="session")
def sample_question_store(sample_index):
    from relsim.analogy import read_questions
    from relsim.patterns import JoiningTermTable
    from relsim.vectors import LocalIndexProvider, VectorStore, build_vector

    table = JoiningTermTable.default()
    provider = LocalIndexProvider(sample_index)
    questions = read_questions(SAMPLE_DATA / "questions.tsv")
    pairs = []
    for q in questions:
        for pair in q.pairs():
            if pair not in pairs:
                pairs.append(pair)
    return VectorStore(table.sha, [build_vector(p, table, provider) for p in pairs])


@pytest.fixture(scope="session")
def sample_nounmod_store(sample_index):
    from relsim.nounmod import read_labeled_pairs
    from relsim.patterns import JoiningTermTable
    from relsim.vectors import LocalIndexProvider, VectorStore, build_vector

    table = JoiningTermTable.default()
    provider = LocalIndexProvider(sample_index)
    items = read_labeled_pairs(SAMPLE_DATA / "nounmod.tsv")
    return VectorStore(
        table.sha, [build_vector(item.pair, table, provider) for item in items]
    )

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from util import CorpusDoc, load_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus() -> list[CorpusDoc]:
    docs = load_corpus()
    assert len(docs) >= 20, "corpus must hold at least 20 documents"
    return docs


@pytest.fixture(scope="session")
def static_corpus(corpus) -> list[CorpusDoc]:
    return [doc for doc in corpus if doc.doc_class == "static"]


@pytest.fixture(scope="session")
def media_corpus(corpus) -> list[CorpusDoc]:
    return [doc for doc in corpus if doc.doc_class == "media"]

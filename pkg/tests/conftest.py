from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse as sp

import topicforge
from topicforge.dtm import DocTermMatrix, Vocabulary, build_matrix, build_vocabulary
from topicforge.ingest import categorize_records, parse_records
from topicforge.textprep import (
    LemmaLexicon,
    StopwordList,
    TokenizedDoc,
    preprocess_corpus,
)


def make_matrix(dense, terms=None) -> DocTermMatrix:
    """DocTermMatrix from a dense count array, with a synthetic vocabulary."""
    dense = np.asarray(dense)
    if terms is None:
        terms = tuple(f"t{i:02d}" for i in range(dense.shape[1]))
    presence = (dense > 0).sum(axis=0)
    vocab = Vocabulary(
        terms=tuple(terms),
        index={t: i for i, t in enumerate(terms)},
        doc_freq=tuple(int(x) for x in presence),
    )
    return DocTermMatrix(
        sp.csr_matrix(dense), list(range(dense.shape[0])), vocab=vocab
    )


def docs_from_token_lists(token_lists) -> list[TokenizedDoc]:
    return [TokenizedDoc(record_id=i, tokens=tuple(ts)) for i, ts in enumerate(token_lists)]


@pytest.fixture(scope="session")
def sample_csv() -> str:
    return str(topicforge.data_path())


@pytest.fixture(scope="session")
def stoplist() -> StopwordList:
    return StopwordList.builtin()


@pytest.fixture(scope="session")
def lexicon() -> LemmaLexicon:
    return LemmaLexicon.builtin()


@pytest.fixture(scope="session")
def sample_docs(sample_csv, stoplist, lexicon):
    records = categorize_records(parse_records(sample_csv))
    return preprocess_corpus(records, stoplist, lexicon, min_tokens=3)


@pytest.fixture(scope="session")
def sample_matrix(sample_docs):
    vocab = build_vocabulary(sample_docs, min_df=2, max_df_fraction=0.8)
    return build_matrix(sample_docs, vocab)

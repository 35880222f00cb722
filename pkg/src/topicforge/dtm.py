"""Vocabulary, sparse document-term counts, train/test splits, co-occurrence.

The count matrix is the numerical input shared by all three topic models;
co-occurrence statistics feed the coherence metrics. Term ordering is
lexicographic so identical inputs always produce identical matrices.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from .textprep import TokenizedDoc


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    index: dict[str, int]
    doc_freq: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.terms)


class DocTermMatrix:
    """Sparse per-document term counts with document-id provenance.

    Documents that lose every token to vocabulary filtering are excluded and
    their ids kept in ``excluded_doc_ids``.
    """

    def __init__(
        self,
        counts: sp.csr_matrix,
        doc_ids: Sequence[int],
        excluded_doc_ids: Sequence[int] = (),
        vocab: Vocabulary | None = None,
    ):
        counts = sp.csr_matrix(counts)
        counts.eliminate_zeros()
        if counts.shape[0] != len(doc_ids):
            raise ValueError("doc_ids length must match matrix rows")
        if counts.nnz and counts.data.min() < 1:
            raise ValueError("counts must be positive")
        self.counts = counts
        self.doc_ids = tuple(doc_ids)
        self.excluded_doc_ids = tuple(excluded_doc_ids)
        self.vocab = vocab

    @property
    def n_docs(self) -> int:
        return self.counts.shape[0]

    @property
    def n_terms(self) -> int:
        return self.counts.shape[1]

    @property
    def total_tokens(self) -> int:
        return int(self.counts.sum())

    def doc_lengths(self) -> np.ndarray:
        return np.asarray(self.counts.sum(axis=1)).ravel()

    def triples(self) -> Iterator[tuple[int, int, int]]:
        """Yield (doc_id, term_id, count) in row-major order."""
        coo = self.counts.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for i in order:
            yield self.doc_ids[coo.row[i]], int(coo.col[i]), int(coo.data[i])

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Term indices and counts of document i."""
        start, end = self.counts.indptr[i], self.counts.indptr[i + 1]
        return self.counts.indices[start:end], self.counts.data[start:end]


@dataclass(frozen=True)
class CorpusSplit:
    train: DocTermMatrix
    test: DocTermMatrix
    seed: int
    ratio: float


class CooccurrenceStats:
    """Document-level presence counts for single terms and term pairs."""

    def __init__(self, doc_count: int, presence: sp.csc_matrix, vocab: Vocabulary):
        self.doc_count = doc_count
        self._presence = presence
        self.vocab = vocab
        self.single = {
            t: int(n) for t, n in zip(vocab.terms, np.asarray(presence.sum(axis=0)).ravel())
        }

    def pair(self, a: str, b: str) -> int:
        """Number of documents containing both terms; symmetric, a != b."""
        if a == b:
            raise ValueError("pair counts are undefined for identical terms")
        ia, ib = self.vocab.index[a], self.vocab.index[b]
        col_a = self._presence.indices[self._presence.indptr[ia]: self._presence.indptr[ia + 1]]
        col_b = self._presence.indices[self._presence.indptr[ib]: self._presence.indptr[ib + 1]]
        return int(np.intersect1d(col_a, col_b, assume_unique=True).size)


def build_vocabulary(
    docs: Sequence[TokenizedDoc], min_df: int = 2, max_df_fraction: float = 0.5
) -> Vocabulary:
    """Terms with document frequency in [min_df, max_df_fraction * n_docs], sorted."""
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if not 0 < max_df_fraction <= 1:
        raise ValueError("max_df_fraction must be in (0, 1]")
    df = Counter()
    for doc in docs:
        df.update(set(doc.tokens))
    max_df = max_df_fraction * len(docs)
    terms = sorted(t for t, n in df.items() if min_df <= n <= max_df)
    if not terms:
        raise ValueError("vocabulary empty after filtering")
    return Vocabulary(
        terms=tuple(terms),
        index={t: i for i, t in enumerate(terms)},
        doc_freq=tuple(df[t] for t in terms),
    )


def build_matrix(docs: Sequence[TokenizedDoc], vocab: Vocabulary) -> DocTermMatrix:
    """Count in-vocabulary tokens per document; drop documents left empty."""
    if len(vocab) == 0:
        raise ValueError("vocabulary is empty")
    rows, cols, data = [], [], []
    doc_ids, excluded = [], []
    for doc in docs:
        counts = Counter(t for t in doc.tokens if t in vocab.index)
        if not counts:
            excluded.append(doc.record_id)
            continue
        r = len(doc_ids)
        doc_ids.append(doc.record_id)
        for term, n in counts.items():
            rows.append(r)
            cols.append(vocab.index[term])
            data.append(n)
    counts = sp.csr_matrix(
        (data, (rows, cols)), shape=(len(doc_ids), len(vocab)), dtype=np.int64
    )
    return DocTermMatrix(counts, doc_ids, excluded, vocab=vocab)


def split_train_test(matrix: DocTermMatrix, ratio: float, seed: int) -> CorpusSplit:
    """Seeded shuffle split: ceil(ratio * n_docs) documents train, rest test."""
    if not 0 < ratio <= 1:
        raise ValueError("ratio must be in (0, 1]")
    if matrix.n_docs < 1:
        raise ValueError("matrix has no documents")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(matrix.n_docs)
    n_train = int(np.ceil(ratio * matrix.n_docs))
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])

    def take(idx: np.ndarray) -> DocTermMatrix:
        return DocTermMatrix(
            sp.csr_matrix(matrix.counts[idx]),
            [matrix.doc_ids[i] for i in idx],
            vocab=matrix.vocab,
        )

    return CorpusSplit(train=take(train_idx), test=take(test_idx), seed=seed, ratio=ratio)


def cooccurrence_counts(docs: Sequence[TokenizedDoc], vocab: Vocabulary) -> CooccurrenceStats:
    """Presence-based counts over the given corpus (multiplicity ignored)."""
    if len(vocab) == 0:
        raise ValueError("vocabulary is empty")
    rows, cols = [], []
    for r, doc in enumerate(docs):
        for term in set(doc.tokens):
            idx = vocab.index.get(term)
            if idx is not None:
                rows.append(r)
                cols.append(idx)
    presence = sp.csc_matrix(
        (np.ones(len(rows), dtype=np.int32), (rows, cols)),
        shape=(len(docs), len(vocab)),
    )
    presence.sort_indices()
    return CooccurrenceStats(doc_count=len(docs), presence=presence, vocab=vocab)


def write_matrix(matrix: DocTermMatrix, stream: TextIO) -> None:
    """Dump as `doc_id term_id count` triplet lines."""
    for doc_id, term_id, count in matrix.triples():
        stream.write(f"{doc_id} {term_id} {count}\n")


def write_vocabulary(vocab: Vocabulary, stream: TextIO) -> None:
    """Dump as `term_id term doc_freq` sidecar lines."""
    for i, (term, df) in enumerate(zip(vocab.terms, vocab.doc_freq)):
        stream.write(f"{i} {term} {df}\n")

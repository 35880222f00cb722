"""Shared topic-model representation produced by all fitters.

A fitted model is two stochastic matrices (topics over terms, documents over
topics) plus provenance; every evaluator works off this one shape regardless
of which algorithm produced it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dtm import Vocabulary

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class FitMeta:
    iterations: int
    final_objective: float
    seed: int
    warnings: tuple[str, ...] = ()
    objective_trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class TopicTermRanking:
    topic_id: int
    ranked_terms: tuple[tuple[str, float], ...]


class TopicModel:
    """K topic-word distributions and per-document topic mixtures."""

    def __init__(
        self,
        kind: str,
        topic_word: np.ndarray,
        doc_topic: np.ndarray,
        vocab: Vocabulary,
        fit_meta: FitMeta,
    ):
        if kind not in ("lda", "plsa", "nmf"):
            raise ValueError(f"unknown model kind {kind!r}")
        topic_word = np.asarray(topic_word, dtype=np.float64)
        doc_topic = np.asarray(doc_topic, dtype=np.float64)
        if topic_word.ndim != 2 or topic_word.shape[0] < 1:
            raise ValueError("topic_word must be a K x V matrix with K >= 1")
        if topic_word.shape[1] != len(vocab):
            raise ValueError("topic_word column count must equal vocabulary size")
        if doc_topic.ndim != 2 or doc_topic.shape[1] != topic_word.shape[0]:
            raise ValueError("doc_topic column count must equal K")
        for name, m in (("topic_word", topic_word), ("doc_topic", doc_topic)):
            if m.size and m.min() < 0:
                raise ValueError(f"{name} entries must be non-negative")
            if m.shape[0] and np.abs(m.sum(axis=1) - 1.0).max() > ROW_SUM_TOL:
                raise ValueError(f"{name} rows must sum to 1 within {ROW_SUM_TOL}")
        self.kind = kind
        self.topic_word = topic_word
        self.doc_topic = doc_topic
        self.vocab = vocab
        self.fit_meta = fit_meta

    @property
    def n_topics(self) -> int:
        return self.topic_word.shape[0]


def top_n_words(model: TopicModel, topic_id: int, n: int) -> TopicTermRanking:
    """Top-n terms of a topic by weight; ties broken by vocabulary order."""
    if not 0 <= topic_id < model.n_topics:
        raise ValueError(f"topic_id {topic_id} out of range [0, {model.n_topics})")
    if n < 1:
        raise ValueError("n must be >= 1")
    weights = model.topic_word[topic_id]
    # lexsort: last key is primary, so sort by -weight then by index
    order = np.lexsort((np.arange(len(weights)), -weights))[:n]
    ranked = tuple((model.vocab.terms[i], float(weights[i])) for i in order)
    return TopicTermRanking(topic_id=topic_id, ranked_terms=ranked)


def predictive_word_dist(model: TopicModel, doc_topic_row: Sequence[float]) -> np.ndarray:
    """Mixture distribution over terms: sum_z p(z|d) p(w|z)."""
    theta = np.asarray(doc_topic_row, dtype=np.float64)
    if theta.shape != (model.n_topics,):
        raise ValueError("doc_topic_row must have one entry per topic")
    return theta @ model.topic_word


def mixture_fold_in(
    topic_word: np.ndarray,
    doc_terms: np.ndarray,
    doc_counts: np.ndarray,
    tol: float = 1e-6,
    max_iterations: int = 500,
    floor: float = 1e-12,
) -> np.ndarray:
    """Infer p(z|d) for one unseen document with topic_word frozen.

    Iterates theta_z <- theta_z * sum_w n_w p(w|z) / p(w|d) until the document
    log-likelihood improves by less than tol relatively. The per-document
    objective is concave in theta, so the uniform start reaches the optimum.
    Empty documents return the uniform mixture.
    """
    k = topic_word.shape[0]
    if len(doc_terms) == 0:
        return np.full(k, 1.0 / k)
    counts = np.asarray(doc_counts, dtype=np.float64)
    phi_cols = topic_word[:, doc_terms]  # k x nd
    theta = np.full(k, 1.0 / k)
    prev_ll = -np.inf
    for _ in range(max_iterations):
        mix = theta @ phi_cols
        np.maximum(mix, floor, out=mix)
        ll = float(np.dot(counts, np.log(mix)))
        theta = theta * (phi_cols @ (counts / mix))
        total = theta.sum()
        if total <= 0:
            return np.full(k, 1.0 / k)
        theta /= total
        if np.isfinite(prev_ll) and ll - prev_ll <= tol * abs(prev_ll):
            break
        prev_ll = ll
    return theta


def batch_mixture_fold_in(
    topic_word: np.ndarray,
    matrix,
    tol: float = 1e-6,
    max_iterations: int = 500,
    init_theta: np.ndarray | None = None,
    floor: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized mixture fold-in over all documents of a DocTermMatrix.

    Returns (theta, per_doc_log_likelihood); iteration stops once every
    document's log-likelihood improvement falls below tol relatively.
    """
    import scipy.sparse as sp

    k = topic_word.shape[0]
    n = matrix.n_docs
    coo = matrix.counts.tocoo()
    rows, cols = coo.row, coo.col
    vals = coo.data.astype(np.float64)
    theta = np.full((n, k), 1.0 / k) if init_theta is None else init_theta.copy()
    prev_ll = np.full(n, -np.inf)
    ll = prev_ll
    for _ in range(max_iterations):
        mix = np.einsum("ij,ji->i", theta[rows], topic_word[:, cols])
        np.maximum(mix, floor, out=mix)
        logs = vals * np.log(mix)
        ll = np.zeros(n)
        np.add.at(ll, rows, logs)
        ratio = sp.csr_matrix((vals / mix, (rows, cols)), shape=matrix.counts.shape)
        theta = theta * (ratio @ topic_word.T)
        totals = theta.sum(axis=1, keepdims=True)
        empty = totals.ravel() <= 0
        if empty.any():
            theta[empty] = 1.0 / k
            totals[empty] = 1.0
        theta /= totals
        done = np.isfinite(prev_ll) & (ll - prev_ll <= tol * np.abs(prev_ll))
        if done.all():
            break
        prev_ll = ll
    return theta, ll


def log_likelihood(matrix, doc_topic: np.ndarray, topic_word: np.ndarray) -> float:
    """Corpus log-likelihood sum_dw n(d,w) ln(sum_z p(z|d) p(w|z)), natural log."""
    coo = matrix.counts.tocoo()
    total = 0.0
    chunk = 200_000
    for start in range(0, coo.nnz, chunk):
        rows = coo.row[start:start + chunk]
        cols = coo.col[start:start + chunk]
        vals = coo.data[start:start + chunk]
        mix = np.einsum("ij,ji->i", doc_topic[rows], topic_word[:, cols])
        total += float(np.dot(vals, np.log(mix)))
    return total


def save_model(model: TopicModel, path: str | Path) -> None:
    """Serialize to JSON; decimal representations round-trip bit-exactly."""
    payload = {
        "kind": model.kind,
        "k": model.n_topics,
        "seed": model.fit_meta.seed,
        "iterations": model.fit_meta.iterations,
        "final_objective": model.fit_meta.final_objective,
        "warnings": list(model.fit_meta.warnings),
        "vocabulary": list(model.vocab.terms),
        "doc_freq": list(model.vocab.doc_freq),
        "topic_word": [[float(x) for x in row] for row in model.topic_word],
        "doc_topic": [[float(x) for x in row] for row in model.doc_topic],
    }
    Path(path).write_text(
        json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_model(path: str | Path) -> TopicModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    terms = tuple(payload["vocabulary"])
    vocab = Vocabulary(
        terms=terms,
        index={t: i for i, t in enumerate(terms)},
        doc_freq=tuple(payload["doc_freq"]),
    )
    meta = FitMeta(
        iterations=payload["iterations"],
        final_objective=payload["final_objective"],
        seed=payload["seed"],
        warnings=tuple(payload["warnings"]),
    )
    return TopicModel(
        kind=payload["kind"],
        topic_word=np.array(payload["topic_word"], dtype=np.float64),
        doc_topic=np.array(payload["doc_topic"], dtype=np.float64),
        vocab=vocab,
        fit_meta=meta,
    )

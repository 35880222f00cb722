"""Non-negative matrix factorization by multiplicative updates.

Factorizes the count matrix V (docs x terms) as W H with W, H >= 0 under the
squared Frobenius objective. The updates never form the dense W H product, so
large sparse corpora stay cheap. A separate conversion step renormalizes the
factors into the shared probabilistic model so the perplexity and coherence
code written for the other models applies unchanged; that mapping is an
interpretation layer, not part of the factorization itself.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dtm import DocTermMatrix, Vocabulary
from .model_api import FitMeta, TopicModel

_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class NmfConfig:
    k: int
    max_iterations: int = 500
    tol: float = 1e-6
    seed: int = 0
    objective: str = "frobenius"
    validate: bool = False  # assert non-negativity after every update

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.objective != "frobenius":
            raise ValueError(f"unsupported objective {self.objective!r}")


@dataclass
class NmfFactors:
    W: np.ndarray  # n_docs x k document loadings
    H: np.ndarray  # k x n_terms topic loadings
    objective_trace: tuple[float, ...]
    iterations: int
    seed: int


def _frobenius_sq(v_coo, v_sq_sum: float, W: np.ndarray, H: np.ndarray) -> float:
    """||V - W H||_F^2 without densifying W H."""
    wh_at_nnz = np.einsum("ij,ji->i", W[v_coo.row], H[:, v_coo.col])
    cross = float(np.dot(v_coo.data, wh_at_nnz))
    wh_sq = float(np.sum((W.T @ W) * (H @ H.T)))
    return max(v_sq_sum - 2.0 * cross + wh_sq, 0.0)


def fit_nmf(matrix: DocTermMatrix, config: NmfConfig) -> NmfFactors:
    """Seeded multiplicative updates until relative improvement < tol."""
    if matrix.n_docs < 1 or matrix.total_tokens < 1:
        raise ValueError("matrix has no tokens to fit")
    if config.k > min(matrix.n_docs, matrix.n_terms):
        warnings.warn(
            f"k={config.k} exceeds min(n_docs, n_terms)="
            f"{min(matrix.n_docs, matrix.n_terms)}; factorization is overcomplete",
            stacklevel=2,
        )
    rng = np.random.default_rng(config.seed)
    W = rng.random((matrix.n_docs, config.k)) + 1e-4
    H = rng.random((config.k, matrix.n_terms)) + 1e-4

    V = matrix.counts.astype(np.float64)
    Vt = sp.csr_matrix(V.T)
    v_coo = V.tocoo()
    v_sq_sum = float(np.dot(v_coo.data, v_coo.data))

    trace = [_frobenius_sq(v_coo, v_sq_sum, W, H)]
    iterations = 0
    for _ in range(config.max_iterations):
        H *= (Vt @ W).T / ((W.T @ W) @ H + _DENOM_FLOOR)
        W *= (V @ H.T) / (W @ (H @ H.T) + _DENOM_FLOOR)
        if config.validate:
            assert W.min() >= 0 and H.min() >= 0, "negative factor entry"
        iterations += 1
        trace.append(_frobenius_sq(v_coo, v_sq_sum, W, H))
        if trace[-2] - trace[-1] <= config.tol * trace[-2]:
            break
    return NmfFactors(
        W=W, H=H, objective_trace=tuple(trace), iterations=iterations, seed=config.seed
    )


def nmf_to_topic_model(factors: NmfFactors, vocab: Vocabulary) -> TopicModel:
    """Normalize the factors into row-stochastic topic and document tables.

    topic_word rows are H rows scaled to sum 1; doc_topic rows redistribute
    each document's loadings weighted by the topic scales, so the implied
    mixture reproduces W H up to a per-document constant. Zero rows fall back
    to uniform with a warning recorded in fit_meta.
    """
    k, n_terms = factors.H.shape
    if n_terms != len(vocab):
        raise ValueError("H column count must equal vocabulary size")
    notes = []
    h_sums = factors.H.sum(axis=1)
    topic_word = np.empty_like(factors.H)
    for z in range(k):
        if h_sums[z] <= 0:
            topic_word[z] = 1.0 / n_terms
            notes.append(f"topic {z}: zero topic-loading row, set to uniform")
        else:
            topic_word[z] = factors.H[z] / h_sums[z]

    doc_topic = factors.W * h_sums[None, :]
    row_sums = doc_topic.sum(axis=1, keepdims=True)
    empty = row_sums.ravel() <= 0
    if empty.any():
        doc_topic[empty] = 1.0 / k
        row_sums[empty] = 1.0
        notes.append(f"{int(empty.sum())} document(s) with zero loadings, set to uniform")
    doc_topic = doc_topic / row_sums

    return TopicModel(
        kind="nmf",
        topic_word=topic_word,
        doc_topic=doc_topic,
        vocab=vocab,
        fit_meta=FitMeta(
            iterations=factors.iterations,
            final_objective=factors.objective_trace[-1],
            seed=factors.seed,
            warnings=tuple(notes),
            objective_trace=factors.objective_trace,
        ),
    )

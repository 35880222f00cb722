"""Probabilistic latent semantic analysis fit by expectation-maximization.

The aspect model p(w, d) = sum_z p(z|d) p(w|z) is fit with exact EM (no
smoothing during the fit), so the training log-likelihood is non-decreasing
every iteration. Overfitting is guarded by an optional validation split of
training documents: fitting stops once the held-out likelihood of that split
drops, and the parameters from the best validation iteration are returned.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dtm import DocTermMatrix
from .model_api import FitMeta, TopicModel, batch_mixture_fold_in, mixture_fold_in

_FLOOR = 1e-12


@dataclass(frozen=True)
class PlsaConfig:
    k: int
    max_iterations: int = 500
    tol: float = 1e-6
    seed: int = 0
    early_stop_fraction: float = 0.1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0 <= self.early_stop_fraction < 0.5:
            raise ValueError("early_stop_fraction must be in [0, 0.5)")


def _random_rows(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    m = rng.random(shape) + 1e-4
    return m / m.sum(axis=1, keepdims=True)


def fit_plsa(matrix: DocTermMatrix, config: PlsaConfig) -> TopicModel:
    """Fit by EM; stops on relative log-likelihood improvement below tol,
    a validation-likelihood drop, or max_iterations, whichever comes first."""
    if matrix.n_docs < 1 or matrix.total_tokens < 1:
        raise ValueError("matrix has no tokens to fit")
    if matrix.vocab is None:
        raise ValueError("matrix must carry its vocabulary (use build_matrix)")

    rng = np.random.default_rng(config.seed)
    n_val = int(config.early_stop_fraction * matrix.n_docs)
    perm = rng.permutation(matrix.n_docs)
    val_idx = np.sort(perm[:n_val])
    em_idx = np.sort(perm[n_val:])
    em_counts = sp.csr_matrix(matrix.counts[em_idx])
    val_matrix = None
    if n_val:
        val_matrix = DocTermMatrix(
            sp.csr_matrix(matrix.counts[val_idx]),
            [matrix.doc_ids[i] for i in val_idx],
            vocab=matrix.vocab,
        )

    n_em = em_counts.shape[0]
    k, n_terms = config.k, matrix.n_terms
    theta = _random_rows(rng, (n_em, k))  # p(z|d)
    phi = _random_rows(rng, (k, n_terms))  # p(w|z)

    coo = em_counts.tocoo()
    rows, cols = coo.row, coo.col
    vals = coo.data.astype(np.float64)

    trace: list[float] = []
    stop_reason = "max_iterations"
    best_val_ll = -np.inf
    val_theta = None
    prev_params = None
    for _ in range(config.max_iterations):
        mix = np.einsum("ij,ji->i", theta[rows], phi[:, cols])
        ll = float(np.dot(vals, np.log(mix)))
        trace.append(ll)
        if len(trace) >= 2:
            improvement = trace[-1] - trace[-2]
            if improvement <= config.tol * abs(trace[-2]):
                stop_reason = "tol"
                break
        # shared E-step responsibilities feed both M-step updates
        ratio = sp.csr_matrix((vals / mix, (rows, cols)), shape=em_counts.shape)
        new_phi = phi * (theta.T @ ratio)
        new_phi /= new_phi.sum(axis=1, keepdims=True)
        new_theta = theta * (ratio @ phi.T)
        new_theta /= new_theta.sum(axis=1, keepdims=True)
        prev_params = (theta, phi)
        theta, phi = new_theta, new_phi
        if val_matrix is not None:
            val_theta, val_lls = batch_mixture_fold_in(
                phi, val_matrix, tol=config.tol, init_theta=val_theta, floor=_FLOOR
            )
            val_ll = float(val_lls.sum())
            if val_ll < best_val_ll:
                theta, phi = prev_params  # roll back to the better iteration
                stop_reason = "validation_decrease"
                break
            best_val_ll = val_ll

    # mixtures for every document of the input matrix, reserved docs via fold-in
    doc_topic = np.empty((matrix.n_docs, k))
    doc_topic[em_idx] = theta
    if n_val:
        folded, _ = batch_mixture_fold_in(phi, val_matrix, tol=config.tol, floor=_FLOOR)
        doc_topic[val_idx] = folded

    return TopicModel(
        kind="plsa",
        topic_word=phi,
        doc_topic=doc_topic,
        vocab=matrix.vocab,
        fit_meta=FitMeta(
            iterations=len(trace),
            final_objective=trace[-1],
            seed=config.seed,
            warnings=(f"stopped: {stop_reason}",),
            objective_trace=tuple(trace),
        ),
    )


def plsa_fold_in(
    model: TopicModel,
    doc_terms: np.ndarray,
    doc_counts: np.ndarray,
    config: PlsaConfig,
) -> np.ndarray:
    """EM over p(z|d) only; topic-word parameters stay untouched."""
    if model.kind != "plsa":
        raise ValueError(f"expected a plsa model, got {model.kind!r}")
    return mixture_fold_in(
        model.topic_word,
        np.asarray(doc_terms),
        np.asarray(doc_counts),
        tol=config.tol,
        max_iterations=config.max_iterations,
        floor=_FLOOR,
    )

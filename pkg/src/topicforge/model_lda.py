"""Latent Dirichlet Allocation fit by collapsed Gibbs sampling.

Token-topic assignments are sampled with the continuous parameters integrated
out; parameter estimates are averaged over thinned post-burn-in sweeps. The
sampler threads an explicit xorshift64* RNG state through the numba kernels so
runs are bit-reproducible for a fixed seed, independent of global RNG state.
Sampling is single-threaded; that is the reproducibility baseline.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .dtm import DocTermMatrix
from .model_api import FitMeta, TopicModel, log_likelihood

_U64 = np.uint64
_MANT = 1.0 / 9007199254740992.0  # 2**-53


@dataclass(frozen=True)
class LdaConfig:
    k: int
    alpha: float | None = None  # None -> 50/k
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 500
    thin: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not self.iterations > self.burn_in >= 0:
            raise ValueError("need iterations > burn_in >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")

    @property
    def resolved_alpha(self) -> float:
        return 50.0 / self.k if self.alpha is None else self.alpha


@dataclass
class GibbsState:
    """Mutable sampler state; count invariants hold after every token update."""

    token_term: np.ndarray  # term id per token occurrence
    token_doc: np.ndarray  # doc index per token occurrence
    z: np.ndarray  # topic assignment per token occurrence
    n_dk: np.ndarray  # doc x topic counts
    n_kw: np.ndarray  # topic x term counts
    n_k: np.ndarray  # topic totals
    rng_state: int


@numba.njit(cache=True, inline="always")
def _rng_step(state):
    # xorshift64*; state must be a nonzero uint64
    state ^= state >> _U64(12)
    state ^= state << _U64(25)
    state ^= state >> _U64(27)
    return state


@numba.njit(cache=True, inline="always")
def _rng_uniform(state):
    return ((state * _U64(2685821657736338717)) >> _U64(11)) * _MANT


@numba.njit(cache=True)
def _token_probs(di, wi, n_dk, n_kw, n_k, alpha, beta, vbeta, probs):
    """Unnormalized conditional topic weights for one held-out token; returns the sum."""
    total = 0.0
    for k in range(probs.shape[0]):
        p = (n_dk[di, k] + alpha) * (n_kw[k, wi] + beta) / (n_k[k] + vbeta)
        probs[k] = p
        total += p
    return total


@numba.njit(cache=True)
def _gibbs_sweep(token_term, token_doc, z, n_dk, n_kw, n_k, alpha, beta, vbeta, state, probs):
    k_topics = probs.shape[0]
    for i in range(token_term.shape[0]):
        wi = token_term[i]
        di = token_doc[i]
        zi = z[i]
        n_dk[di, zi] -= 1
        n_kw[zi, wi] -= 1
        n_k[zi] -= 1
        total = _token_probs(di, wi, n_dk, n_kw, n_k, alpha, beta, vbeta, probs)
        state = _rng_step(state)
        u = _rng_uniform(state) * total
        acc = 0.0
        zi = k_topics - 1
        for k in range(k_topics):
            acc += probs[k]
            if u < acc:
                zi = k
                break
        z[i] = zi
        n_dk[di, zi] += 1
        n_kw[zi, wi] += 1
        n_k[zi] += 1
    return state


@numba.njit(cache=True)
def _fold_in_sweep(token_term, z, n_k_doc, topic_word, alpha, state, probs):
    k_topics = probs.shape[0]
    for i in range(token_term.shape[0]):
        wi = token_term[i]
        zi = z[i]
        n_k_doc[zi] -= 1
        total = 0.0
        for k in range(k_topics):
            p = (n_k_doc[k] + alpha) * topic_word[k, wi]
            probs[k] = p
            total += p
        state = _rng_step(state)
        u = _rng_uniform(state) * total
        acc = 0.0
        zi = k_topics - 1
        for k in range(k_topics):
            acc += probs[k]
            if u < acc:
                zi = k
                break
        z[i] = zi
        n_k_doc[zi] += 1
    return state


def _seed_to_state(rng: np.random.Generator) -> int:
    state = 0
    while state == 0:
        state = int(rng.integers(1, 2**64, dtype=np.uint64))
    return state


def init_gibbs_state(matrix: DocTermMatrix, config: LdaConfig) -> GibbsState:
    """Expand the matrix to token occurrences and assign random initial topics."""
    coo = matrix.counts.tocoo()
    order = np.lexsort((coo.col, coo.row))
    token_term = np.repeat(coo.col[order], coo.data[order]).astype(np.int32)
    token_doc = np.repeat(coo.row[order], coo.data[order]).astype(np.int32)
    rng = np.random.default_rng(config.seed)
    z = rng.integers(0, config.k, size=token_term.shape[0]).astype(np.int32)
    n_dk = np.zeros((matrix.n_docs, config.k), dtype=np.int64)
    n_kw = np.zeros((config.k, matrix.n_terms), dtype=np.int64)
    n_k = np.zeros(config.k, dtype=np.int64)
    np.add.at(n_dk, (token_doc, z), 1)
    np.add.at(n_kw, (z, token_term), 1)
    np.add.at(n_k, z, 1)
    return GibbsState(
        token_term=token_term,
        token_doc=token_doc,
        z=z,
        n_dk=n_dk,
        n_kw=n_kw,
        n_k=n_k,
        rng_state=_seed_to_state(rng),
    )


def gibbs_sweep(state: GibbsState, config: LdaConfig) -> None:
    """Run one full in-place sweep over all token assignments."""
    probs = np.empty(config.k, dtype=np.float64)
    state.rng_state = int(
        _gibbs_sweep(
            state.token_term,
            state.token_doc,
            state.z,
            state.n_dk,
            state.n_kw,
            state.n_k,
            config.resolved_alpha,
            config.beta,
            config.beta * state.n_kw.shape[1],
            _U64(state.rng_state),
            probs,
        )
    )


def _estimate_topic_word(state: GibbsState, config: LdaConfig, n_terms: int) -> np.ndarray:
    return (state.n_kw + config.beta) / (state.n_k[:, None] + config.beta * n_terms)


def _estimate_doc_topic(state: GibbsState, config: LdaConfig) -> np.ndarray:
    doc_len = state.n_dk.sum(axis=1, keepdims=True)
    return (state.n_dk + config.resolved_alpha) / (doc_len + config.k * config.resolved_alpha)


def fit_lda(matrix: DocTermMatrix, config: LdaConfig) -> TopicModel:
    """Fit by collapsed Gibbs sampling; deterministic for a fixed seed."""
    if matrix.n_docs < 1 or matrix.total_tokens < 1:
        raise ValueError("matrix has no tokens to fit")
    if matrix.vocab is None:
        raise ValueError("matrix must carry its vocabulary (use build_matrix)")
    state = init_gibbs_state(matrix, config)
    phi_acc = np.zeros((config.k, matrix.n_terms))
    theta_acc = np.zeros((matrix.n_docs, config.k))
    samples = 0
    for sweep in range(1, config.iterations + 1):
        gibbs_sweep(state, config)
        if sweep > config.burn_in and (sweep - config.burn_in - 1) % config.thin == 0:
            phi_acc += _estimate_topic_word(state, config, matrix.n_terms)
            theta_acc += _estimate_doc_topic(state, config)
            samples += 1
    topic_word = phi_acc / samples
    topic_word /= topic_word.sum(axis=1, keepdims=True)
    doc_topic = theta_acc / samples
    doc_topic /= doc_topic.sum(axis=1, keepdims=True)
    return TopicModel(
        kind="lda",
        topic_word=topic_word,
        doc_topic=doc_topic,
        vocab=matrix.vocab,
        fit_meta=FitMeta(
            iterations=config.iterations,
            final_objective=log_likelihood(matrix, doc_topic, topic_word),
            seed=config.seed,
        ),
    )


def lda_fold_in(
    model: TopicModel,
    doc_terms: np.ndarray,
    doc_counts: np.ndarray,
    config: LdaConfig,
    seed: int | None = None,
) -> np.ndarray:
    """Infer a held-out document's topic mixture with topic_word frozen.

    Returns (n_dk + alpha) / (N_d + K alpha) averaged over thinned
    post-burn-in sweeps; an empty document gets the uniform prior.
    """
    if model.kind != "lda":
        raise ValueError(f"expected an lda model, got {model.kind!r}")
    k = model.n_topics
    alpha = config.resolved_alpha
    if len(doc_terms) == 0:
        return np.full(k, 1.0 / k)
    tokens = np.repeat(np.asarray(doc_terms, dtype=np.int32),
                       np.asarray(doc_counts, dtype=np.int64))
    rng = np.random.default_rng(config.seed if seed is None else seed)
    z = rng.integers(0, k, size=tokens.shape[0]).astype(np.int32)
    n_k_doc = np.bincount(z, minlength=k).astype(np.int64)
    state = _U64(_seed_to_state(rng))
    probs = np.empty(k, dtype=np.float64)
    n_d = tokens.shape[0]
    theta_acc = np.zeros(k)
    samples = 0
    for sweep in range(1, config.iterations + 1):
        state = _U64(_fold_in_sweep(tokens, z, n_k_doc, model.topic_word, alpha, state, probs))
        if sweep > config.burn_in and (sweep - config.burn_in - 1) % config.thin == 0:
            theta_acc += (n_k_doc + alpha) / (n_d + k * alpha)
            samples += 1
    theta = theta_acc / samples
    return theta / theta.sum()

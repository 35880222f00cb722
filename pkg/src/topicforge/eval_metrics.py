"""Held-out perplexity, topic coherence, and the topic-count sweep.

Perplexity is exp of the negative average per-word held-out log-likelihood
(natural log), so a uniform model scores exactly the vocabulary size. Two
coherence variants are provided: the smoothed conditional log-ratio sum over
ranked top-word pairs, and normalized PMI bounded to [-1, 1]. Document-level
co-occurrence only; no sliding windows.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .dtm import CooccurrenceStats, CorpusSplit, DocTermMatrix
from .model_api import TopicModel, mixture_fold_in, predictive_word_dist, top_n_words
from .model_lda import fit_lda, lda_fold_in
from .model_nmf import fit_nmf, nmf_to_topic_model
from .model_plsa import fit_plsa, plsa_fold_in

# fold-in callable: (model, term_ids, counts, doc_position) -> mixture over topics
FoldIn = Callable[[TopicModel, np.ndarray, np.ndarray, int], np.ndarray]


class ModelFitError(Exception):
    """A model fit failed; message names the model kind and K."""


@dataclass(frozen=True)
class PerplexityResult:
    value: float
    heldout_docs: int
    heldout_tokens: int
    smoothing_epsilon: float


@dataclass(frozen=True)
class CoherenceResult:
    per_topic: tuple[float, ...]
    mean: float
    variant: str
    top_n: int
    per_topic_per_pair: tuple[float, ...]  # per-pair normalization for cross-N comparison
    mean_per_pair: float
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class SweepRow:
    k: int
    coherence_umass: float
    coherence_npmi: float
    perplexity: float
    fit_seconds: float


def perplexity(
    model: TopicModel,
    heldout: DocTermMatrix,
    fold_in: FoldIn,
    epsilon: float = 1e-12,
) -> PerplexityResult:
    """exp(-sum_d log p(D_d) / sum_d N_d) with log p(D_d) = sum_w n ln(p(w|d) + eps)."""
    if heldout.n_docs < 1:
        raise ValueError("no test documents")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    total_log = 0.0
    total_tokens = 0
    for i in range(heldout.n_docs):
        terms, counts = heldout.row(i)
        theta = fold_in(model, terms, counts, i)
        word_dist = predictive_word_dist(model, theta)
        probs = word_dist[terms]
        if epsilon == 0.0 and np.any(probs == 0.0):
            w = int(terms[int(np.argmin(probs))])
            term = model.vocab.terms[w] if model.vocab else str(w)
            raise ValueError(
                f"zero probability for term {term!r} in held-out doc "
                f"{heldout.doc_ids[i]} with epsilon=0"
            )
        total_log += float(np.dot(counts, np.log(probs + epsilon)))
        total_tokens += int(counts.sum())
    value = float(np.exp(-total_log / total_tokens))
    return PerplexityResult(
        value=value,
        heldout_docs=heldout.n_docs,
        heldout_tokens=total_tokens,
        smoothing_epsilon=epsilon,
    )


def _umass_pair(stats: CooccurrenceStats, w_later: str, w_earlier: str) -> float:
    return float(np.log((stats.pair(w_later, w_earlier) + 1.0) / stats.single[w_earlier]))


def _npmi_pair(stats: CooccurrenceStats, a: str, b: str, epsilon: float = 1e-12) -> float:
    pair = stats.pair(a, b)
    if pair == 0:
        return -1.0
    if pair == stats.doc_count:
        # co-occurs everywhere: numerator ln(1) = 0 at the boundary
        return 0.0
    n = stats.doc_count
    p_ab = pair / n
    num = np.log(p_ab) - np.log(stats.single[a] / n) - np.log(stats.single[b] / n)
    den = -np.log(p_ab)
    return float(num / max(den, epsilon))


def coherence(
    model: TopicModel,
    stats: CooccurrenceStats,
    top_n: int = 10,
    variant: str = "umass",
) -> CoherenceResult:
    """Per-topic co-occurrence coherence over each topic's ranked top-n words."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if variant not in ("umass", "npmi"):
        raise ValueError(f"unknown coherence variant {variant!r}")
    notes: list[str] = []
    per_topic: list[float] = []
    per_pair: list[float] = []
    for t in range(model.n_topics):
        words = [term for term, _ in top_n_words(model, t, top_n).ranked_terms]
        if len(words) < 2:
            notes.append(f"topic {t}: fewer than 2 ranked words, score 0 by convention")
            per_topic.append(0.0)
            per_pair.append(0.0)
            continue
        if variant == "umass":
            # rank order matters: later words are conditioned on earlier ones
            scores = [
                _umass_pair(stats, words[i], words[j])
                for i in range(1, len(words))
                for j in range(i)
            ]
            per_topic.append(float(sum(scores)))
        else:
            scores = [
                _npmi_pair(stats, words[i], words[j])
                for i in range(1, len(words))
                for j in range(i)
            ]
            per_topic.append(float(np.mean(scores)))
        per_pair.append(float(np.mean(scores)))
    return CoherenceResult(
        per_topic=tuple(per_topic),
        mean=float(np.mean(per_topic)),
        variant=variant,
        top_n=top_n,
        per_topic_per_pair=tuple(per_pair),
        mean_per_pair=float(np.mean(per_pair)),
        notes=tuple(notes),
    )


def make_fold_in(model_kind: str, base_config) -> FoldIn:
    """Held-out inference procedure for a model kind.

    LDA samples with frozen topic-word estimates (per-document seeds derived
    from the config seed); PLSA and NMF run the shared mixture EM. NMF has no
    native held-out story, so its converted probabilistic form is used.
    """
    if model_kind == "lda":
        def fold(model, terms, counts, position):
            return lda_fold_in(model, terms, counts, base_config,
                               seed=[base_config.seed, position])
    elif model_kind == "plsa":
        def fold(model, terms, counts, position):
            return plsa_fold_in(model, terms, counts, base_config)
    elif model_kind == "nmf":
        def fold(model, terms, counts, position):
            return mixture_fold_in(model.topic_word, terms, counts,
                                   tol=base_config.tol,
                                   max_iterations=base_config.max_iterations)
    else:
        raise ValueError(f"unknown model kind {model_kind!r}")
    return fold


def fit_model(train: DocTermMatrix, model_kind: str, config) -> TopicModel:
    if model_kind == "lda":
        return fit_lda(train, config)
    if model_kind == "plsa":
        return fit_plsa(train, config)
    if model_kind == "nmf":
        return nmf_to_topic_model(fit_nmf(train, config), train.vocab)
    raise ValueError(f"unknown model kind {model_kind!r}")


def select_k(rows: Sequence[SweepRow], variant: str) -> int:
    """K with the highest mean coherence; ties resolved to the smaller K."""
    def score(row: SweepRow) -> float:
        return row.coherence_umass if variant == "umass" else row.coherence_npmi

    best = rows[0]
    for row in rows[1:]:
        if score(row) > score(best) or (score(row) == score(best) and row.k < best.k):
            best = row
    return best.k


def sweep_topic_count(
    matrix: DocTermMatrix,
    split: CorpusSplit,
    ks: Sequence[int],
    model_kind: str,
    base_config,
    stats: CooccurrenceStats,
    top_n: int = 10,
    variant: str = "npmi",
    epsilon: float = 1e-12,
    keep_models: dict[int, TopicModel] | None = None,
) -> tuple[list[SweepRow], int]:
    """Fit per K on the train split, score coherence (full-corpus stats) and
    held-out perplexity, and pick the K with the best mean coherence.

    Pass a dict as keep_models to capture the fitted model per K.
    """
    if not ks or any(k < 1 for k in ks):
        raise ValueError("ks must be a non-empty list of integers >= 1")
    rows = []
    for k in ks:
        config = replace(base_config, k=k)
        started = time.perf_counter()
        try:
            model = fit_model(split.train, model_kind, config)
        except (ValueError, FloatingPointError) as exc:
            raise ModelFitError(f"{model_kind} fit failed at K={k}: {exc}") from exc
        fit_seconds = time.perf_counter() - started
        if keep_models is not None:
            keep_models[k] = model
        umass = coherence(model, stats, top_n=top_n, variant="umass").mean
        npmi = coherence(model, stats, top_n=top_n, variant="npmi").mean
        perp = perplexity(model, split.test, make_fold_in(model_kind, config), epsilon)
        rows.append(
            SweepRow(
                k=k,
                coherence_umass=umass,
                coherence_npmi=npmi,
                perplexity=perp.value,
                fit_seconds=fit_seconds,
            )
        )
    return rows, select_k(rows, variant)

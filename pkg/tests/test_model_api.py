from __future__ import annotations

import numpy as np
import pytest

from topicforge.dtm import Vocabulary
from topicforge.model_api import (
    FitMeta,
    TopicModel,
    load_model,
    mixture_fold_in,
    predictive_word_dist,
    save_model,
    top_n_words,
)


def vocab_of(*terms):
    return Vocabulary(
        terms=tuple(terms),
        index={t: i for i, t in enumerate(terms)},
        doc_freq=(1,) * len(terms),
    )


def model_of(topic_word, doc_topic=None, kind="plsa", seed=0):
    topic_word = np.asarray(topic_word, dtype=float)
    if doc_topic is None:
        k = topic_word.shape[0]
        doc_topic = np.full((1, k), 1.0 / k)
    terms = [f"w{i}" for i in range(topic_word.shape[1])]
    return TopicModel(
        kind=kind,
        topic_word=topic_word,
        doc_topic=np.asarray(doc_topic, dtype=float),
        vocab=vocab_of(*terms),
        fit_meta=FitMeta(iterations=1, final_objective=0.0, seed=seed),
    )


class TestTopNWords:
    def test_basic_ranking(self):
        model = model_of([[0.5, 0.3, 0.2]])
        ranking = top_n_words(model, 0, 2)
        assert [t for t, _ in ranking.ranked_terms] == ["w0", "w1"]

    def test_tie_broken_by_vocab_index(self):
        model = model_of([[0.0, 0.5, 0.5, 0.0]])
        ranking = top_n_words(model, 0, 2)
        assert [t for t, _ in ranking.ranked_terms] == ["w1", "w2"]

    def test_n_larger_than_vocab_returns_all(self):
        model = model_of([[0.5, 0.3, 0.2]])
        assert len(top_n_words(model, 0, 10).ranked_terms) == 3

    def test_weights_non_increasing(self):
        rng = np.random.default_rng(2)
        row = rng.random(12)
        model = model_of([row / row.sum()])
        weights = [w for _, w in top_n_words(model, 0, 12).ranked_terms]
        assert all(a >= b for a, b in zip(weights, weights[1:]))

    def test_topic_id_out_of_range(self):
        model = model_of([[1.0]])
        with pytest.raises(ValueError):
            top_n_words(model, 1, 1)
        with pytest.raises(ValueError):
            top_n_words(model, -1, 1)

    def test_rescaled_topic_same_order(self):
        rng = np.random.default_rng(4)
        raw = rng.random(9)
        a = model_of([raw / raw.sum()])
        b = model_of([(7.3 * raw) / (7.3 * raw).sum()])
        order_a = [t for t, _ in top_n_words(a, 0, 9).ranked_terms]
        order_b = [t for t, _ in top_n_words(b, 0, 9).ranked_terms]
        assert order_a == order_b


class TestPredictiveWordDist:
    def test_single_topic_identity(self):
        model = model_of([[0.6, 0.4]])
        out = predictive_word_dist(model, [1.0])
        np.testing.assert_array_equal(out, [0.6, 0.4])

    def test_hand_mixture(self):
        model = model_of([[1.0, 0.0], [0.0, 1.0]])
        out = predictive_word_dist(model, [0.5, 0.5])
        np.testing.assert_allclose(out, [0.5, 0.5])

    def test_sums_to_one(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            k, v = int(rng.integers(1, 6)), int(rng.integers(2, 9))
            tw = rng.random((k, v))
            tw /= tw.sum(axis=1, keepdims=True)
            theta = rng.random(k)
            theta /= theta.sum()
            model = model_of(tw)
            assert abs(predictive_word_dist(model, theta).sum() - 1.0) < 1e-9

    def test_linear_in_mixture(self):
        rng = np.random.default_rng(12)
        tw = rng.random((3, 5))
        tw /= tw.sum(axis=1, keepdims=True)
        model = model_of(tw)
        t1, t2 = rng.random(3), rng.random(3)
        lhs = predictive_word_dist(model, 0.25 * t1 + 0.75 * t2)
        rhs = 0.25 * predictive_word_dist(model, t1) + 0.75 * predictive_word_dist(model, t2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_shape_validation(self):
        model = model_of([[0.6, 0.4]])
        with pytest.raises(ValueError):
            predictive_word_dist(model, [0.5, 0.5])


class TestModelValidation:
    def test_rejects_unnormalized_rows(self):
        with pytest.raises(ValueError):
            model_of([[0.7, 0.7]])

    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            model_of([[1.5, -0.5]])

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            model_of([[1.0]], kind="lsa")

    def test_rejects_vocab_mismatch(self):
        with pytest.raises(ValueError):
            TopicModel(
                kind="plsa",
                topic_word=np.array([[0.5, 0.5]]),
                doc_topic=np.array([[1.0]]),
                vocab=vocab_of("only"),
                fit_meta=FitMeta(1, 0.0, 0),
            )


class TestSerialization:
    def test_round_trip_values_and_bytes(self, tmp_path):
        rng = np.random.default_rng(31)
        tw = rng.random((3, 7))
        tw /= tw.sum(axis=1, keepdims=True)
        dt = rng.random((4, 3))
        dt /= dt.sum(axis=1, keepdims=True)
        model = model_of(tw, doc_topic=dt, kind="nmf", seed=123)
        p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
        save_model(model, p1)
        loaded = load_model(p1)
        assert loaded.kind == "nmf"
        assert loaded.fit_meta.seed == 123
        np.testing.assert_array_equal(loaded.topic_word, model.topic_word)
        np.testing.assert_array_equal(loaded.doc_topic, model.doc_topic)
        assert loaded.vocab.terms == model.vocab.terms
        save_model(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestMixtureFoldIn:
    def test_empty_doc_uniform(self):
        tw = np.array([[0.5, 0.5], [0.9, 0.1]])
        out = mixture_fold_in(tw, np.array([], dtype=int), np.array([], dtype=int))
        np.testing.assert_array_equal(out, [0.5, 0.5])

    def test_concentrates_on_matching_topic(self):
        tw = np.array([[0.98, 0.01, 0.01], [0.01, 0.01, 0.98]])
        theta = mixture_fold_in(tw, np.array([2]), np.array([5]))
        assert theta.argmax() == 1
        assert theta[1] > 0.9

    def test_normalized(self):
        rng = np.random.default_rng(3)
        tw = rng.random((4, 6))
        tw /= tw.sum(axis=1, keepdims=True)
        theta = mixture_fold_in(tw, np.array([0, 2, 5]), np.array([2, 1, 4]))
        assert abs(theta.sum() - 1.0) < 1e-12

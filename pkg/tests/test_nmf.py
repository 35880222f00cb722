from __future__ import annotations

import numpy as np
import pytest

from topicforge.model_nmf import NmfConfig, NmfFactors, fit_nmf, nmf_to_topic_model

from conftest import make_matrix


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            NmfConfig(k=0)
        with pytest.raises(ValueError):
            NmfConfig(k=2, tol=0.0)
        with pytest.raises(ValueError):
            NmfConfig(k=2, objective="kl")


class TestFit:
    def test_rank1_exact_recovery(self):
        m = make_matrix([[2, 4], [1, 2]])
        dense = m.counts.toarray().astype(float)
        factors = fit_nmf(m, NmfConfig(k=1, seed=0))
        assert factors.iterations <= 500
        residual = np.linalg.norm(dense - factors.W @ factors.H)
        assert residual < 1e-6

    def test_non_negativity_preserved_every_iteration(self):
        # same seed means run prefixes agree, so stepping the cap checks
        # the factors after every individual update round
        m = make_matrix([[2, 0, 1], [0, 3, 1], [1, 1, 4]])
        for n in range(1, 12):
            factors = fit_nmf(m, NmfConfig(k=2, seed=5, max_iterations=n, tol=1e-30))
            assert factors.W.min() >= 0
            assert factors.H.min() >= 0

    def test_validate_flag_asserts_internally(self):
        m = make_matrix([[2, 0, 1], [0, 3, 1]])
        factors = fit_nmf(m, NmfConfig(k=2, seed=1, validate=True))
        assert factors.W.min() >= 0

    def test_objective_trace_non_increasing_random(self):
        rng = np.random.default_rng(0)
        for seed in range(10):
            dense = np.ceil(rng.random((6, 5)) * 5).astype(int)
            m = make_matrix(dense)
            factors = fit_nmf(m, NmfConfig(k=3, seed=seed))
            t = np.array(factors.objective_trace)
            assert np.all(t[1:] <= t[:-1] * (1 + 1e-9) + 1e-12)

    def test_deterministic(self):
        m = make_matrix([[2, 0, 1], [0, 3, 1], [1, 1, 4]])
        a = fit_nmf(m, NmfConfig(k=2, seed=9))
        b = fit_nmf(m, NmfConfig(k=2, seed=9))
        np.testing.assert_array_equal(a.W, b.W)
        np.testing.assert_array_equal(a.H, b.H)

    def test_overcomplete_rank_warns(self):
        m = make_matrix([[1, 2], [2, 1]])
        with pytest.warns(UserWarning, match="overcomplete"):
            fit_nmf(m, NmfConfig(k=5, seed=0, max_iterations=3))

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError):
            fit_nmf(make_matrix(np.zeros((0, 2))), NmfConfig(k=1))


class TestToTopicModel:
    def test_topic_rows_sum_to_one(self):
        m = make_matrix([[2, 0, 1], [0, 3, 1], [1, 1, 4]])
        factors = fit_nmf(m, NmfConfig(k=2, seed=2))
        model = nmf_to_topic_model(factors, m.vocab)
        assert model.kind == "nmf"
        np.testing.assert_allclose(model.topic_word.sum(axis=1), 1.0, atol=1e-9)
        np.testing.assert_allclose(model.doc_topic.sum(axis=1), 1.0, atol=1e-9)

    def test_zero_topic_row_becomes_uniform_with_warning(self):
        m = make_matrix([[1, 1], [1, 1]])
        factors = NmfFactors(
            W=np.array([[1.0, 0.0], [1.0, 0.0]]),
            H=np.array([[0.5, 0.5], [0.0, 0.0]]),
            objective_trace=(1.0,),
            iterations=1,
            seed=0,
        )
        model = nmf_to_topic_model(factors, m.vocab)
        np.testing.assert_array_equal(model.topic_word[1], [0.5, 0.5])
        assert any("zero topic-loading" in w for w in model.fit_meta.warnings)

    def test_doc_topic_hand_normalization(self):
        # W = [[2, 0]] with unit topic scales collapses onto topic 0
        m = make_matrix([[1, 1]])
        factors = NmfFactors(
            W=np.array([[2.0, 0.0]]),
            H=np.array([[0.5, 0.5], [0.25, 0.75]]),
            objective_trace=(1.0,),
            iterations=1,
            seed=0,
        )
        model = nmf_to_topic_model(factors, m.vocab)
        np.testing.assert_array_equal(model.doc_topic, [[1.0, 0.0]])

    def test_mixture_reproduces_wh_up_to_doc_scale(self):
        m = make_matrix([[2, 0, 1], [0, 3, 1], [1, 1, 4]])
        factors = fit_nmf(m, NmfConfig(k=2, seed=7))
        model = nmf_to_topic_model(factors, m.vocab)
        wh = factors.W @ factors.H
        mixture = model.doc_topic @ model.topic_word
        for d in range(wh.shape[0]):
            scale = wh[d].sum()
            np.testing.assert_allclose(mixture[d], wh[d] / scale, atol=1e-12)

    def test_vocab_size_mismatch_rejected(self):
        m = make_matrix([[1, 1, 1]])
        factors = NmfFactors(
            W=np.array([[1.0]]), H=np.array([[1.0, 1.0]]),
            objective_trace=(0.0,), iterations=1, seed=0,
        )
        with pytest.raises(ValueError):
            nmf_to_topic_model(factors, m.vocab)

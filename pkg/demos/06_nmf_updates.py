"""Non-negative matrix factorization with multiplicative updates.

The count matrix is factorized as V ~ W H under the squared Frobenius
objective; the classic multiplicative update rules keep both factors
non-negative and the objective non-increasing. A separate normalization
step turns the factors into the same row-stochastic form the other models
produce, so one set of metrics applies to all three.
"""
import numpy as np

import topicforge
from topicforge.dtm import build_matrix, build_vocabulary
from topicforge.ingest import categorize_records, parse_records
from topicforge.model_api import top_n_words
from topicforge.model_nmf import NmfConfig, fit_nmf, nmf_to_topic_model
from topicforge.textprep import LemmaLexicon, StopwordList, preprocess_corpus

records = categorize_records(parse_records(topicforge.data_path()))
docs = preprocess_corpus(records, StopwordList.builtin(), LemmaLexicon.builtin())
vocab = build_vocabulary(docs, min_df=2, max_df_fraction=0.8)
matrix = build_matrix(docs, vocab)

factors = fit_nmf(matrix, NmfConfig(k=3, seed=7))
trace = np.array(factors.objective_trace)
print(f"NMF ran {factors.iterations} iterations")
print(f"objective ||V - WH||^2: {trace[0]:.1f} -> {trace[-1]:.1f}, "
      f"non-increasing: {bool(np.all(trace[1:] <= trace[:-1] * (1 + 1e-9)))}")
print(f"factors: W {factors.W.shape} >= 0: {factors.W.min() >= 0}, "
      f"H {factors.H.shape} >= 0: {factors.H.min() >= 0}")

model = nmf_to_topic_model(factors, vocab)
print("\nnormalized into the shared model form; topic rows sum to "
      f"{model.topic_word.sum(axis=1).round(12).tolist()}")
for t in range(model.n_topics):
    words = ", ".join(term for term, _ in top_n_words(model, t, 8).ranked_terms)
    print(f"  topic {t}: {words}")

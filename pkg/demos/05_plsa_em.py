"""Fitting the PLSA aspect model with EM.

Each iteration computes responsibilities p(z|d,w) proportional to
p(z|d) p(w|z), then renormalizes both tables from count-weighted
responsibilities. The training log-likelihood is recorded every iteration
and can only go up; a slice of training documents can be reserved as a
validation set, stopping the fit when their held-out likelihood drops.
"""
import numpy as np

import topicforge
from topicforge.dtm import build_matrix, build_vocabulary
from topicforge.ingest import categorize_records, parse_records
from topicforge.model_api import top_n_words
from topicforge.model_plsa import PlsaConfig, fit_plsa, plsa_fold_in
from topicforge.textprep import LemmaLexicon, StopwordList, preprocess_corpus

records = categorize_records(parse_records(topicforge.data_path()))
docs = preprocess_corpus(records, StopwordList.builtin(), LemmaLexicon.builtin())
vocab = build_vocabulary(docs, min_df=2, max_df_fraction=0.8)
matrix = build_matrix(docs, vocab)

config = PlsaConfig(k=3, seed=7, early_stop_fraction=0.1)
model = fit_plsa(matrix, config)
trace = np.array(model.fit_meta.objective_trace)
print(f"EM ran {model.fit_meta.iterations} iterations ({model.fit_meta.warnings[0]})")
print(f"log-likelihood: {trace[0]:.2f} -> {trace[-1]:.2f}, "
      f"monotone: {bool(np.all(np.diff(trace) >= -1e-9))}")

for t in range(model.n_topics):
    words = ", ".join(term for term, _ in top_n_words(model, t, 8).ranked_terms)
    print(f"  topic {t}: {words}")

# fold-in for an unseen document re-runs EM over its mixture only; the
# topic-word table is untouched (bit-for-bit)
before = model.topic_word.tobytes()
terms, counts = matrix.row(2)
theta = plsa_fold_in(model, terms, counts, config)
assert model.topic_word.tobytes() == before
print(f"\nfold-in mixture for doc 2: {np.round(theta, 3)} (topic-word table unchanged)")

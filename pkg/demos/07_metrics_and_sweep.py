"""Scoring models: held-out perplexity, coherence, and the topic-count sweep.

Perplexity is exp of the negative average per-word log-likelihood over test
documents whose mixtures are inferred by fold-in; a uniform model over V
terms scores exactly V, and lower is better. Coherence scores how often a
topic's top words actually co-occur: the log-ratio variant sums smoothed
conditional log-probabilities over ranked pairs (usually negative), the
normalized-PMI variant is bounded in [-1, 1]. The sweep fits every
candidate K and keeps the K with the best mean coherence.
"""
import numpy as np

import topicforge
from topicforge.dtm import build_matrix, build_vocabulary, cooccurrence_counts, split_train_test
from topicforge.eval_metrics import coherence, make_fold_in, perplexity, sweep_topic_count
from topicforge.ingest import categorize_records, parse_records
from topicforge.model_api import FitMeta, TopicModel
from topicforge.model_nmf import NmfConfig
from topicforge.textprep import LemmaLexicon, StopwordList, preprocess_corpus

records = categorize_records(parse_records(topicforge.data_path()))
docs = preprocess_corpus(records, StopwordList.builtin(), LemmaLexicon.builtin())
vocab = build_vocabulary(docs, min_df=2, max_df_fraction=0.8)
matrix = build_matrix(docs, vocab)
split = split_train_test(matrix, ratio=0.8, seed=42)
stats = cooccurrence_counts(docs, vocab)

# sanity anchor: a uniform model's perplexity equals the vocabulary size
v = len(vocab)
uniform = TopicModel(
    kind="nmf",
    topic_word=np.full((1, v), 1.0 / v),
    doc_topic=np.ones((1, 1)),
    vocab=vocab,
    fit_meta=FitMeta(0, 0.0, 0),
)
result = perplexity(uniform, split.test, lambda m, t, c, i: np.ones(1))
print(f"uniform model over {v} terms -> perplexity {result.value:.6f}")

rows, best_k = sweep_topic_count(
    matrix, split, [2, 3, 5], "nmf", NmfConfig(k=2, seed=0),
    stats=stats, top_n=8, variant="npmi",
)
print("\nsweep over K (NMF):")
for row in rows:
    marker = " <- selected" if row.k == best_k else ""
    print(f"  K={row.k}: npmi {row.coherence_npmi:+.3f}  "
          f"umass {row.coherence_umass:7.2f}  perplexity {row.perplexity:7.2f}{marker}")

from topicforge.eval_metrics import fit_model  # noqa: E402

model = fit_model(split.train, "nmf", NmfConfig(k=best_k, seed=0))
both = {variant: coherence(model, stats, top_n=8, variant=variant) for variant in ("umass", "npmi")}
print(f"\nselected K={best_k}: per-topic npmi {np.round(both['npmi'].per_topic, 3).tolist()}")
print(f"perplexity at K={best_k}: "
      f"{perplexity(model, split.test, make_fold_in('nmf', NmfConfig(k=best_k, seed=0))).value:.2f}")

"""From token lists to the sparse count matrix the models consume.

Vocabulary terms are filtered by document frequency (too rare or too
ubiquitous terms are dropped) and ordered lexicographically so the same
corpus always yields the same matrix. The train/test split is a seeded
shuffle; co-occurrence statistics (document-level presence) feed the
coherence metrics later.
"""
import io

import topicforge
from topicforge.dtm import (
    build_matrix,
    build_vocabulary,
    cooccurrence_counts,
    split_train_test,
    write_matrix,
    write_vocabulary,
)
from topicforge.ingest import categorize_records, parse_records
from topicforge.textprep import LemmaLexicon, StopwordList, preprocess_corpus

records = categorize_records(parse_records(topicforge.data_path()))
docs = preprocess_corpus(records, StopwordList.builtin(), LemmaLexicon.builtin())

vocab = build_vocabulary(docs, min_df=2, max_df_fraction=0.8)
print(f"vocabulary: {len(vocab)} terms (document frequency in [2, 0.8*n_docs])")
print("  first terms:", vocab.terms[:10])

matrix = build_matrix(docs, vocab)
print(f"\nmatrix: {matrix.n_docs} docs x {matrix.n_terms} terms, "
      f"{matrix.counts.nnz} nonzeros, {matrix.total_tokens} tokens")
print("  docs dropped as out-of-vocabulary:", matrix.excluded_doc_ids)

split = split_train_test(matrix, ratio=0.8, seed=42)
print(f"\nsplit: {split.train.n_docs} train / {split.test.n_docs} test docs (seed 42)")
print("  train ids:", split.train.doc_ids[:8], "...")

stats = cooccurrence_counts(docs, vocab)
a, b = "engine", "fire"
print(f"\nco-occurrence: D({a})={stats.single[a]}, D({b})={stats.single[b]}, "
      f"D({a},{b})={stats.pair(a, b)} of {stats.doc_count} docs")

buf = io.StringIO()
write_matrix(matrix, buf)
print("\ntriplet dump (doc_id term_id count), first lines:")
print("\n".join(buf.getvalue().splitlines()[:4]))
buf = io.StringIO()
write_vocabulary(vocab, buf)
print("vocabulary sidecar (term_id term doc_freq), first lines:")
print("\n".join(buf.getvalue().splitlines()[:4]))

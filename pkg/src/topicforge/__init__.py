"""topicforge: compare LDA, PLSA and NMF topic models on accident narratives.

The package is a plain numpy/scipy library plus a small CLI. A typical run
ingests a Socrata-style CSV of aviation accident reports, categorizes records
by operator (military / commercial / private), preprocesses the narrative
text, builds a sparse document-term count matrix, fits the three topic models
over a sweep of topic counts, and scores each by held-out perplexity and
topic coherence, writing a side-by-side comparison report.

Quick start::

    from topicforge import data_path, ingest, textprep, dtm
    from topicforge.model_lda import LdaConfig, fit_lda

    records = ingest.categorize_records(ingest.parse_records(data_path()))
    docs = textprep.preprocess_corpus(
        records, textprep.StopwordList.builtin(), textprep.LemmaLexicon.builtin()
    )
    vocab = dtm.build_vocabulary(docs, min_df=2, max_df_fraction=0.8)
    matrix = dtm.build_matrix(docs, vocab)
    model = fit_lda(matrix, LdaConfig(k=3, iterations=200, burn_in=100, seed=1))

See the demos/ directory for narrative walkthroughs of each stage, and
``topicforge run --help`` for the pipeline CLI.
"""
from importlib import resources

__version__ = "0.1.0"


def data_path(name: str = "sample_narratives.csv"):
    """Filesystem path of a shipped data file (sample corpus, word lists)."""
    return resources.files("topicforge.data").joinpath(name)


from . import dtm, eval_metrics, ingest, model_api, model_lda, model_nmf, model_plsa, textprep  # noqa: E402

__all__ = [
    "__version__",
    "data_path",
    "dtm",
    "eval_metrics",
    "ingest",
    "model_api",
    "model_lda",
    "model_nmf",
    "model_plsa",
    "textprep",
]

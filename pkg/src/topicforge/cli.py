"""Command line interface: `topicforge run` and `topicforge report`.

Every pipeline config key is exposed as a flag of the same name; flags win
over the config file. Exit codes: 0 success, 2 input/config error, 3 empty
corpus after filtering, 4 model fit failure.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .eval_metrics import ModelFitError
from .ingest import ConfigurationError, CsvParseError
from .pipeline import (
    EmptyCorpusError,
    PipelineInputError,
    load_config,
    render_comparison_text,
    run_pipeline,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY_CORPUS = 3
EXIT_MODEL_FAILURE = 4

_RUN_FLAGS: tuple[tuple[str, str], ...] = (
    ("input", "input CSV path"),
    ("out", "output directory"),
    ("category", "operator filter: all|military|commercial|private"),
    ("models", "comma list of models to run (plsa,nmf,lda)"),
    ("ks", "comma list of topic counts to sweep"),
    ("seed", "master random seed"),
    ("operator_column", "CSV column holding the operator"),
    ("narrative_column", "CSV column holding the narrative"),
    ("date_column", "CSV column holding the date"),
    ("stopwords", "extra stopword file (one token per line)"),
    ("lemma_exceptions", "replacement lemma exceptions file (token<TAB>lemma)"),
    ("wordlist", "replacement dictionary word list"),
    ("min_tokens", "drop documents with fewer surviving tokens"),
    ("min_df", "minimum document frequency for vocabulary terms"),
    ("max_df", "maximum document-frequency fraction for vocabulary terms"),
    ("split_ratio", "train fraction for the held-out split"),
    ("coherence", "coherence variant used for K selection: umass|npmi"),
    ("top_n", "top words per topic for coherence and reports"),
    ("wordcloud_top_n", "terms per word-cloud frequency export"),
    ("epsilon", "perplexity smoothing epsilon"),
    ("reproducible", "true/false: zero out timing columns for byte-stable outputs"),
    ("lda_alpha", "document-topic prior (<=0 selects 50/K)"),
    ("lda_beta", "topic-word prior"),
    ("lda_iterations", "Gibbs sweeps"),
    ("lda_burn_in", "sweeps before estimates are averaged"),
    ("lda_thin", "keep every n-th post-burn-in sweep"),
    ("plsa_iterations", "EM iteration cap"),
    ("plsa_tol", "relative log-likelihood improvement threshold"),
    ("plsa_early_stop", "fraction of training docs held out for early stopping"),
    ("nmf_iterations", "multiplicative update cap"),
    ("nmf_tol", "relative objective improvement threshold"),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicforge",
        description="Compare LDA, PLSA and NMF topic models on accident narratives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline from a config and flags")
    run.add_argument("--config", help="flat key = value config file")
    for name, help_text in _RUN_FLAGS:
        run.add_argument(f"--{name}", dest=name, default=None, help=help_text)

    report = sub.add_parser("report", help="re-render tables from a saved bundle")
    report.add_argument("--bundle", required=True, help="output directory of a previous run")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    overrides = {name: getattr(args, name) for name, _ in _RUN_FLAGS}
    try:
        config = load_config(args.config, overrides)
        bundle = run_pipeline(config)
    except (PipelineInputError, ConfigurationError, CsvParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyCorpusError as exc:
        print(f"error: empty corpus: {exc}", file=sys.stderr)
        return EXIT_EMPTY_CORPUS
    except ModelFitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL_FAILURE
    print((bundle.out_dir / "comparison.txt").read_text(encoding="utf-8"), end="")
    print(f"outputs written to {bundle.out_dir}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    bundle_dir = Path(args.bundle)
    comparison = bundle_dir / "comparison.csv"
    if not comparison.exists():
        print(f"error: no comparison.csv under {bundle_dir}", file=sys.stderr)
        return EXIT_INPUT
    with open(comparison, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    print(render_comparison_text(rows), end="")
    sweep = bundle_dir / "sweep.csv"
    if sweep.exists():
        with open(sweep, encoding="utf-8", newline="") as fh:
            sweep_rows = list(csv.DictReader(fh))
        print()
        print(render_comparison_text(sweep_rows), end="")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_report(args)


if __name__ == "__main__":
    sys.exit(main())

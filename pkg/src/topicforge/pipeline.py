"""End-to-end pipeline: ingest, preprocess, fit the three models, report.

A run is driven by one flat key/value config (file plus CLI overrides) and a
single master seed, so identical configs reproduce identical outputs. In
reproducible mode the timing column of the CSV outputs is zeroed (wall-clock
timings live in the run manifest instead) to keep the files byte-stable.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .dtm import (
    build_matrix,
    build_vocabulary,
    cooccurrence_counts,
    split_train_test,
)
from .eval_metrics import (
    CoherenceResult,
    PerplexityResult,
    SweepRow,
    coherence,
    make_fold_in,
    perplexity,
    sweep_topic_count,
)
from .ingest import (
    CategoryRules,
    ColumnMap,
    OperatorCategory,
    categorize_records,
    parse_records,
)
from .model_api import TopicModel, save_model, top_n_words
from .model_lda import LdaConfig
from .model_nmf import NmfConfig
from .model_plsa import PlsaConfig
from .textprep import LemmaLexicon, StopwordList, preprocess_corpus

MODEL_ORDER = ("plsa", "nmf", "lda")  # fixed report row order
CATEGORIES = ("all", "military", "commercial", "private")


class PipelineInputError(Exception):
    """Bad input file or unusable configuration."""


class EmptyCorpusError(Exception):
    """Nothing left to model after filtering/preprocessing."""


@dataclass(frozen=True)
class PipelineConfig:
    input: str = ""
    out: str = "topicforge_out"
    category: str = "all"
    models: tuple[str, ...] = MODEL_ORDER
    ks: tuple[int, ...] = (5, 10, 15, 20)
    seed: int = 42
    operator_column: str = "Operator"
    narrative_column: str = "Summary"
    date_column: str = "Date"
    stopwords: str = ""  # optional extra stopword file (one token per line)
    lemma_exceptions: str = ""  # optional replacement lemma exceptions file
    wordlist: str = ""  # optional replacement dictionary word list
    min_tokens: int = 3
    min_df: int = 2
    max_df: float = 0.5
    split_ratio: float = 0.8
    coherence: str = "npmi"
    top_n: int = 10
    wordcloud_top_n: int = 50
    epsilon: float = 1e-12
    reproducible: bool = True
    lda_alpha: float = 0.0  # <= 0 means the 50/K heuristic
    lda_beta: float = 0.01
    lda_iterations: int = 1000
    lda_burn_in: int = 500
    lda_thin: int = 10
    plsa_iterations: int = 500
    plsa_tol: float = 1e-6
    plsa_early_stop: float = 0.1
    nmf_iterations: int = 500
    nmf_tol: float = 1e-6

    def validate(self) -> None:
        if not self.input:
            raise PipelineInputError("no input CSV given (config key 'input' or --input)")
        if not Path(self.input).exists():
            raise PipelineInputError(f"input file not found: {self.input}")
        for label, path in (
            ("stopwords", self.stopwords),
            ("lemma_exceptions", self.lemma_exceptions),
            ("wordlist", self.wordlist),
        ):
            if path and not Path(path).exists():
                raise PipelineInputError(f"{label} file not found: {path}")
        if not self.ks or any(k < 1 for k in self.ks):
            raise PipelineInputError("ks must be a non-empty list of integers >= 1")
        if self.category not in CATEGORIES:
            raise PipelineInputError(f"category must be one of {CATEGORIES}")
        if self.min_tokens < 1:
            raise PipelineInputError("min_tokens must be >= 1")
        if self.min_df < 1:
            raise PipelineInputError("min_df must be >= 1")
        if not 0 < self.max_df <= 1:
            raise PipelineInputError("max_df must be in (0, 1]")
        if self.top_n < 1 or self.wordcloud_top_n < 1:
            raise PipelineInputError("top_n and wordcloud_top_n must be >= 1")
        if self.epsilon < 0:
            raise PipelineInputError("epsilon must be >= 0")
        unknown = [m for m in self.models if m not in MODEL_ORDER]
        if unknown:
            raise PipelineInputError(f"unknown models: {unknown}")
        if self.coherence not in ("umass", "npmi"):
            raise PipelineInputError("coherence must be 'umass' or 'npmi'")
        if not 0 < self.split_ratio <= 1:
            raise PipelineInputError("split_ratio must be in (0, 1]")
        if self.split_ratio == 1.0:
            raise PipelineInputError(
                "split_ratio 1.0 leaves no test documents for perplexity"
            )
        for kind in self.models:
            try:
                self.model_config(kind, self.ks[0])
            except ValueError as exc:
                raise PipelineInputError(f"invalid {kind} settings: {exc}") from exc

    def config_hash(self) -> str:
        canon = "".join(
            f"{f.name}={getattr(self, f.name)!r}\n" for f in dataclasses.fields(self)
        )
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def model_config(self, kind: str, k: int):
        if kind == "lda":
            return LdaConfig(
                k=k,
                alpha=None if self.lda_alpha <= 0 else self.lda_alpha,
                beta=self.lda_beta,
                iterations=self.lda_iterations,
                burn_in=self.lda_burn_in,
                thin=self.lda_thin,
                seed=self.seed,
            )
        if kind == "plsa":
            return PlsaConfig(
                k=k,
                max_iterations=self.plsa_iterations,
                tol=self.plsa_tol,
                seed=self.seed,
                early_stop_fraction=self.plsa_early_stop,
            )
        if kind == "nmf":
            return NmfConfig(
                k=k, max_iterations=self.nmf_iterations, tol=self.nmf_tol, seed=self.seed
            )
        raise ValueError(f"unknown model kind {kind!r}")


_CASE_INSENSITIVE_KEYS = ("category", "coherence", "models")


def _parse_value(name: str, raw: str, kind: type):
    raw = raw.strip()
    if name in _CASE_INSENSITIVE_KEYS:
        raw = raw.lower()
    if kind is bool:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise PipelineInputError(f"config key {name}: expected true/false, got {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind is str:
        return raw
    # tuple fields: comma separated
    items = [x.strip() for x in raw.split(",") if x.strip()]
    if name == "ks":
        return tuple(int(x) for x in items)
    return tuple(items)


_FIELD_TYPES = {
    f.name: (bool if f.type == "bool" else int if f.type == "int"
             else float if f.type == "float" else str if f.type == "str" else tuple)
    for f in dataclasses.fields(PipelineConfig)
}


def load_config(path: str | Path | None, overrides: dict | None = None) -> PipelineConfig:
    """Read a flat `key = value` config file and apply CLI overrides (flag wins)."""
    values: dict = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        for line_no, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise PipelineInputError(f"config line {line_no}: expected key = value")
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in _FIELD_TYPES:
                raise PipelineInputError(f"config line {line_no}: unknown key {key!r}")
            values[key] = _parse_value(key, raw, _FIELD_TYPES[key])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if isinstance(value, str) and _FIELD_TYPES[key] is not str:
            value = _parse_value(key, value, _FIELD_TYPES[key])
        values[key] = value
    return PipelineConfig(**values)


@dataclass
class EvalReport:
    model_kind: str
    selected_k: int
    coherence_umass: CoherenceResult
    coherence_npmi: CoherenceResult
    perplexity: PerplexityResult
    sweep_rows: list[SweepRow]
    top_terms: list[tuple[int, list[tuple[str, float]]]]  # (topic_id, ranked terms)
    model: TopicModel


@dataclass
class ReportBundle:
    config: PipelineConfig
    reports: list[EvalReport]
    excluded: list[tuple[int, str]]  # (record_id, reason)
    manifest: dict
    out_dir: Path


def run_pipeline(config: PipelineConfig) -> ReportBundle:
    """Execute ingest -> categorize/filter -> preprocess -> matrix -> sweeps -> report."""
    config.validate()
    timings: dict[str, float] = {}
    t0 = time.perf_counter()

    column_map = ColumnMap(
        operator=config.operator_column,
        narrative=config.narrative_column,
        date=config.date_column,
    )
    records = categorize_records(parse_records(config.input, column_map), CategoryRules())
    n_parsed = len(records)
    if config.category != "all":
        wanted = OperatorCategory(config.category)
        records = [r for r in records if r.category is wanted]

    stoplist = StopwordList.builtin()
    if config.stopwords:
        stoplist = stoplist.union(StopwordList.from_file(config.stopwords))
    lexicon = LemmaLexicon.from_files(
        exceptions_path=config.lemma_exceptions or None,
        wordlist_path=config.wordlist or None,
    )
    docs = preprocess_corpus(records, stoplist, lexicon, min_tokens=config.min_tokens)
    kept_ids = {d.record_id for d in docs}
    excluded = [
        (r.record_id, "empty_narrative" if not r.narrative.strip() else "below_min_tokens")
        for r in records
        if r.record_id not in kept_ids
    ]
    if not docs:
        raise EmptyCorpusError(
            f"no usable narratives after preprocessing ({len(records)} records in)"
        )

    try:
        vocab = build_vocabulary(docs, min_df=config.min_df, max_df_fraction=config.max_df)
    except ValueError as exc:
        raise EmptyCorpusError(str(exc)) from exc
    matrix = build_matrix(docs, vocab)
    excluded += [(doc_id, "vocab_empty") for doc_id in matrix.excluded_doc_ids]
    excluded.sort()
    if matrix.n_docs < 2:
        raise EmptyCorpusError("fewer than two documents survived vocabulary filtering")
    split = split_train_test(matrix, ratio=config.split_ratio, seed=config.seed)
    stats = cooccurrence_counts(docs, vocab)
    timings["prepare"] = time.perf_counter() - t0

    reports = []
    for kind in MODEL_ORDER:
        if kind not in config.models:
            continue
        t_model = time.perf_counter()
        base = config.model_config(kind, config.ks[0])
        models: dict[int, TopicModel] = {}
        rows, selected_k = sweep_topic_count(
            matrix,
            split,
            config.ks,
            kind,
            base,
            stats=stats,
            top_n=config.top_n,
            variant=config.coherence,
            epsilon=config.epsilon,
            keep_models=models,
        )
        model = models[selected_k]
        selected_config = config.model_config(kind, selected_k)
        reports.append(
            EvalReport(
                model_kind=kind,
                selected_k=selected_k,
                coherence_umass=coherence(model, stats, config.top_n, "umass"),
                coherence_npmi=coherence(model, stats, config.top_n, "npmi"),
                perplexity=perplexity(
                    model, split.test, make_fold_in(kind, selected_config), config.epsilon
                ),
                sweep_rows=rows,
                top_terms=[
                    (t, list(top_n_words(model, t, config.top_n).ranked_terms))
                    for t in range(model.n_topics)
                ],
                model=model,
            )
        )
        timings[kind] = time.perf_counter() - t_model

    manifest = {
        "config": {f.name: getattr(config, f.name) for f in dataclasses.fields(config)},
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "version": __version__,
        "records_parsed": n_parsed,
        "records_after_category_filter": len(records),
        "documents_modeled": matrix.n_docs,
        "vocabulary_size": len(vocab),
        "excluded_records": len(excluded),
        "selected_k": {r.model_kind: r.selected_k for r in reports},
        "timings_seconds": {k: round(v, 3) for k, v in timings.items()},
    }
    bundle = ReportBundle(
        config=config,
        reports=reports,
        excluded=excluded,
        manifest=manifest,
        out_dir=Path(config.out),
    )
    write_bundle(bundle)
    return bundle


def _fmt(x: float) -> str:
    return repr(float(x))


def _fit_seconds(value: float, reproducible: bool) -> str:
    return "0.000" if reproducible else f"{value:.3f}"


def comparison_rows(bundle: ReportBundle) -> list[dict]:
    rows = []
    for report in bundle.reports:
        seen: list[str] = []
        for _, ranked in report.top_terms:
            for term, _ in ranked[:3]:
                if term not in seen:
                    seen.append(term)
        rows.append(
            {
                "model": report.model_kind,
                "K": report.selected_k,
                "top_words": ", ".join(seen),
                "coherence_umass": _fmt(report.coherence_umass.mean),
                "coherence_umass_per_pair": _fmt(report.coherence_umass.mean_per_pair),
                "coherence_npmi": _fmt(report.coherence_npmi.mean),
                "perplexity": _fmt(report.perplexity.value),
            }
        )
    return rows


def render_comparison_text(rows: list[dict]) -> str:
    headers = list(rows[0].keys()) if rows else []
    widths = {h: max(len(h), *(len(str(r[h])) for r in rows)) for h in headers}
    lines = [
        "  ".join(h.ljust(widths[h]) for h in headers),
        "  ".join("-" * widths[h] for h in headers),
    ]
    for r in rows:
        lines.append("  ".join(str(r[h]).ljust(widths[h]) for h in headers))
    return "\n".join(lines) + "\n"


def emit_comparison_table(bundle: ReportBundle) -> tuple[str, str]:
    """Comparison table as (plain text, CSV text); one row per model run."""
    rows = comparison_rows(bundle)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return render_comparison_text(rows), buf.getvalue()


def emit_wordcloud_freqs(model: TopicModel, topic_id: int, n: int, path: str | Path) -> None:
    """Write `term,weight` rows for a topic's top-n terms, heaviest first."""
    ranking = top_n_words(model, topic_id, n)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["term", "weight"])
        for term, weight in ranking.ranked_terms:
            writer.writerow([term, _fmt(weight)])


def write_bundle(bundle: ReportBundle) -> None:
    out = bundle.out_dir
    out.mkdir(parents=True, exist_ok=True)
    reproducible = bundle.config.reproducible

    text, csv_text = emit_comparison_table(bundle)
    (out / "comparison.txt").write_text(text, encoding="utf-8")
    (out / "comparison.csv").write_text(csv_text, encoding="utf-8")

    with open(out / "sweep.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["model", "K", "coherence_umass", "coherence_npmi", "perplexity", "fit_seconds"]
        )
        for report in bundle.reports:
            for row in report.sweep_rows:
                writer.writerow(
                    [
                        report.model_kind,
                        row.k,
                        _fmt(row.coherence_umass),
                        _fmt(row.coherence_npmi),
                        _fmt(row.perplexity),
                        _fit_seconds(row.fit_seconds, reproducible),
                    ]
                )

    for report in bundle.reports:
        with open(out / f"topics_{report.model_kind}.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["topic_id", "rank", "term", "weight"])
            for topic_id, ranked in report.top_terms:
                for rank, (term, weight) in enumerate(ranked, start=1):
                    writer.writerow([topic_id, rank, term, _fmt(weight)])
        for topic_id in range(report.model.n_topics):
            emit_wordcloud_freqs(
                report.model,
                topic_id,
                bundle.config.wordcloud_top_n,
                out / f"wordcloud_{report.model_kind}_{topic_id}.csv",
            )
        save_model(report.model, out / f"model_{report.model_kind}.json")

    with open(out / "excluded.log", "w", encoding="utf-8") as fh:
        for record_id, reason in bundle.excluded:
            fh.write(f"{record_id}\t{reason}\n")

    (out / "manifest.json").write_text(
        json.dumps(bundle.manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )

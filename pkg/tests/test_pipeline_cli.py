from __future__ import annotations

import csv
import dataclasses
import json

import numpy as np
import pytest

from topicforge.cli import main
from topicforge.pipeline import (
    PipelineConfig,
    PipelineInputError,
    emit_comparison_table,
    emit_wordcloud_freqs,
    load_config,
    run_pipeline,
)

FAST = dict(
    ks=(2, 3),
    max_df=0.8,
    lda_iterations=60,
    lda_burn_in=20,
    seed=11,
)


def fast_config(sample_csv, out_dir, **extra) -> PipelineConfig:
    merged = {**FAST, "input": sample_csv, "out": str(out_dir), **extra}
    return PipelineConfig(**merged)


@pytest.fixture(scope="module")
def bundle(sample_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle")
    return run_pipeline(fast_config(sample_csv, out))


class TestRunPipeline:
    def test_three_reports_six_sweep_rows_finite(self, bundle):
        assert [r.model_kind for r in bundle.reports] == ["plsa", "nmf", "lda"]
        rows = [row for r in bundle.reports for row in r.sweep_rows]
        assert len(rows) == 6
        for row in rows:
            assert np.isfinite(row.perplexity)
            assert np.isfinite(row.coherence_umass)
            assert np.isfinite(row.coherence_npmi)

    def test_output_files_exist(self, bundle):
        names = {p.name for p in bundle.out_dir.iterdir()}
        expected = {
            "comparison.csv", "comparison.txt", "sweep.csv", "excluded.log",
            "manifest.json", "topics_plsa.csv", "topics_nmf.csv", "topics_lda.csv",
            "model_plsa.json", "model_nmf.json", "model_lda.json",
        }
        assert expected <= names
        for report in bundle.reports:
            for topic_id in range(report.model.n_topics):
                assert f"wordcloud_{report.model_kind}_{topic_id}.csv" in names

    def test_comparison_row_order_fixed(self, bundle):
        with open(bundle.out_dir / "comparison.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["model"] for r in rows] == ["plsa", "nmf", "lda"]

    def test_comparison_csv_round_trips(self, bundle):
        text, csv_text = emit_comparison_table(bundle)
        parsed = list(csv.DictReader(csv_text.splitlines()))
        from topicforge.pipeline import comparison_rows

        original = comparison_rows(bundle)
        assert [list(r.values()) for r in parsed] == [
            [str(v) for v in r.values()] for r in original
        ]

    def test_sweep_csv_header_contract(self, bundle):
        header = (bundle.out_dir / "sweep.csv").read_text().splitlines()[0]
        assert header == "model,K,coherence_umass,coherence_npmi,perplexity,fit_seconds"

    def test_excluded_log_records_empty_narrative(self, bundle):
        lines = (bundle.out_dir / "excluded.log").read_text().splitlines()
        assert "19\tempty_narrative" in lines

    def test_manifest_counts(self, bundle):
        manifest = json.loads((bundle.out_dir / "manifest.json").read_text())
        assert manifest["records_parsed"] == 20
        assert manifest["documents_modeled"] == 19
        assert manifest["selected_k"].keys() == {"plsa", "nmf", "lda"}

    def test_topics_csv_shape(self, bundle):
        with open(bundle.out_dir / "topics_lda.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        lda = next(r for r in bundle.reports if r.model_kind == "lda")
        assert len(rows) == lda.model.n_topics * 10
        assert [int(r["rank"]) for r in rows[:10]] == list(range(1, 11))

    def test_category_filter_runs(self, sample_csv, tmp_path):
        config = fast_config(
            sample_csv, tmp_path / "commercial", category="commercial",
            models=("nmf",), ks=(2,), min_df=2,
        )
        result = run_pipeline(config)
        assert result.manifest["records_after_category_filter"] == 12


class TestDeterminism:
    def test_byte_identical_outputs(self, sample_csv, bundle, tmp_path):
        again = run_pipeline(fast_config(sample_csv, tmp_path / "again"))
        for name in (
            "comparison.csv", "sweep.csv",
            "model_plsa.json", "model_nmf.json", "model_lda.json",
        ):
            assert (bundle.out_dir / name).read_bytes() == (again.out_dir / name).read_bytes()

    def test_config_hash_changes_iff_fields_change(self, sample_csv):
        base = fast_config(sample_csv, "outdir")
        same = fast_config(sample_csv, "outdir")
        assert base.config_hash() == same.config_hash()
        for change in (dict(seed=12), dict(ks=(2,)), dict(min_tokens=4), dict(category="private")):
            other = dataclasses.replace(base, **change)
            assert other.config_hash() != base.config_hash()


class TestWordcloudExport:
    def test_clamps_to_vocab_and_sorted(self, bundle, tmp_path):
        model = bundle.reports[0].model
        path = tmp_path / "wc.csv"
        emit_wordcloud_freqs(model, 0, 5000, path)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(model.vocab)
        weights = [float(r["weight"]) for r in rows]
        assert all(a >= b for a, b in zip(weights, weights[1:]))

    def test_rerun_byte_identical(self, bundle, tmp_path):
        model = bundle.reports[0].model
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_wordcloud_freqs(model, 1, 10, p1)
        emit_wordcloud_freqs(model, 1, 10, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_topic_rejected(self, bundle, tmp_path):
        with pytest.raises(ValueError):
            emit_wordcloud_freqs(bundle.reports[0].model, 99, 5, tmp_path / "x.csv")


class TestConfigFile:
    def test_load_and_override(self, sample_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"input = {sample_csv}\n"
            "ks = 2,3\n"
            "seed = 5  # comment\n"
            "models = nmf\n"
            "# full-line comment\n"
            "reproducible = true\n",
            encoding="utf-8",
        )
        config = load_config(cfg, {"seed": "9"})
        assert config.seed == 9  # flag wins
        assert config.ks == (2, 3)
        assert config.models == ("nmf",)
        assert config.reproducible is True

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("no_such_key = 1\n", encoding="utf-8")
        with pytest.raises(PipelineInputError, match="no_such_key"):
            load_config(cfg)

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("just some text\n", encoding="utf-8")
        with pytest.raises(PipelineInputError, match="line 1"):
            load_config(cfg)

    def test_validation_catches_missing_input(self):
        with pytest.raises(PipelineInputError, match="input"):
            PipelineConfig(input="").validate()

    def test_validation_catches_ratio_one(self, sample_csv):
        with pytest.raises(PipelineInputError, match="test documents"):
            PipelineConfig(input=sample_csv, split_ratio=1.0).validate()


class TestCliExitCodes:
    def test_missing_input_exits_2(self, tmp_path, capsys):
        code = main(["run", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "not found" in capsys.readouterr().err

    def test_empty_corpus_exits_3(self, tmp_path, capsys):
        csv_path = tmp_path / "no_military.csv"
        csv_path.write_text(
            "Date,Operator,Summary\n"
            "01/01/1950,Private,The plane crashed after an engine failure.\n",
            encoding="utf-8",
        )
        code = main([
            "run", "--input", str(csv_path), "--category", "military",
            "--out", str(tmp_path / "o"),
        ])
        assert code == 3

    def test_successful_run_exits_0(self, sample_csv, tmp_path, capsys):
        code = main([
            "run", "--input", sample_csv, "--out", str(tmp_path / "o"),
            "--ks", "2", "--models", "nmf", "--max_df", "0.8", "--seed", "3",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "nmf" in out and "outputs written" in out

    def test_report_rerenders_saved_bundle(self, bundle, capsys):
        code = main(["report", "--bundle", str(bundle.out_dir)])
        assert code == 0
        out = capsys.readouterr().out
        assert "plsa" in out and "coherence_npmi" in out

    def test_report_missing_bundle_exits_2(self, tmp_path, capsys):
        assert main(["report", "--bundle", str(tmp_path / "missing")]) == 2

    def test_model_failure_exits_4(self, sample_csv, tmp_path, monkeypatch, capsys):
        import topicforge.pipeline as pipeline_module
        from topicforge.eval_metrics import ModelFitError

        def boom(*args, **kwargs):
            raise ModelFitError("nmf fit failed at K=2: synthetic")

        monkeypatch.setattr(pipeline_module, "sweep_topic_count", boom)
        code = main([
            "run", "--input", sample_csv, "--out", str(tmp_path / "o"),
            "--ks", "2", "--models", "nmf", "--max_df", "0.8",
        ])
        assert code == 4
        assert "K=2" in capsys.readouterr().err

    def test_flag_overrides_config_file(self, sample_csv, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"input = {sample_csv}\nks = 2\nmodels = nmf\nmax_df = 0.8\n"
            f"out = {tmp_path / 'from_file'}\n",
            encoding="utf-8",
        )
        code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "from_flag")])
        assert code == 0
        assert (tmp_path / "from_flag" / "comparison.csv").exists()
        assert not (tmp_path / "from_file").exists()

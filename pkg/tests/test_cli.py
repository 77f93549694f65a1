from pathlib import Path

import pytest

from biaslens.cli import main

REFERENCE = Path(__file__).resolve().parent.parent / "src" / "biaslens" / "data" / "reference"
POOL = str(REFERENCE / "association_pool.embj")
MASKED = str(REFERENCE / "association_masked.manifest")


class TestExitCodes:
    def test_validate_reference_fixture(self, capsys):
        assert main(["validate", "--embeddings", POOL, "--manifest", MASKED]) == 0
        assert capsys.readouterr().out.strip() == "0 violations"

    def test_iias_requires_seed(self, capsys):
        with pytest.raises(SystemExit) as exit_info:
            main(["iias", "--embeddings", POOL, "--manifest", MASKED])
        assert exit_info.value.code == 2

    def test_negative_seed_is_usage_error(self):
        with pytest.raises(SystemExit) as exit_info:
            main(["iias", "--embeddings", POOL, "--manifest", MASKED, "--seed", "-3"])
        assert exit_info.value.code == 2

    def test_missing_file_is_data_error(self, capsys):
        assert main(["validate", "--embeddings", "nope.embj", "--manifest", MASKED]) == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_collection_fails_validate(self, tmp_path, capsys):
        bad = tmp_path / "bad.embj"
        text = Path(POOL).read_text().splitlines()
        bad.write_text("\n".join(text[:-1]) + "\n")  # drop one record: count mismatch
        assert main(["validate", "--embeddings", str(bad), "--manifest", MASKED]) == 1

    def test_replicate_passes_on_bundled_fixture(self, tmp_path, capsys):
        out = tmp_path / "summary.csv"
        assert main(["replicate", "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "0 failed" in stdout
        assert out.exists()


class TestDeterminism:
    def test_iias_outputs_are_byte_identical(self, tmp_path):
        paths = [tmp_path / "a.md", tmp_path / "b.md"]
        for path in paths:
            assert main([
                "iias", "--embeddings", POOL, "--manifest", MASKED,
                "--seed", "42", "--out", str(path),
            ]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_synth_pipeline_round_trip(self, tmp_path):
        pool = tmp_path / "pool.embj"
        assert main([
            "synth", "--out", str(pool), "--seed", "7", "--dim", "4",
            "--bias", "0.5", "--noise", "0.1",
            "--attribute-count", "20", "--target-count", "20", "--iterations", "2",
        ]) == 0
        manifest = tmp_path / "pool.embj.manifest"
        assert manifest.exists()
        assert main(["validate", "--embeddings", str(pool), "--manifest", str(manifest)]) == 0
        table = tmp_path / "scores.csv"
        assert main([
            "iias", "--embeddings", str(pool), "--manifest", str(manifest),
            "--seed", "1", "--format", "csv", "--out", str(table),
        ]) == 0
        assert "male_coded" in table.read_text()

    def test_synth_deterministic(self, tmp_path):
        pools = [tmp_path / "p1.embj", tmp_path / "p2.embj"]
        for pool in pools:
            main(["synth", "--out", str(pool), "--seed", "11", "--noise", "0.3"])
        assert pools[0].read_bytes() == pools[1].read_bytes()


class TestZeroshotCommand:
    def test_writes_both_tables(self, tmp_path):
        out = tmp_path / "zs.md"
        code = main([
            "zeroshot", "--predictions", str(REFERENCE / "predictions.csv"),
            "--skew-mode", "observed", "--out", str(out),
        ])
        assert code == 0
        occurrence = tmp_path / "zs.occurrence.md"
        skewness = tmp_path / "zs.skewness.md"
        assert occurrence.exists() and skewness.exists()
        assert "man_occurrence" in occurrence.read_text()
        assert "woman_skewness" in skewness.read_text()

    def test_stdout_mode(self, capsys):
        assert main([
            "zeroshot", "--predictions", str(REFERENCE / "predictions.csv"),
        ]) == 0
        out = capsys.readouterr().out
        assert "man_occurrence" in out and "man_skewness" in out

    def test_empty_log_is_data_error(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("image_id,gender,label,encoder,family\n")
        assert main(["zeroshot", "--predictions", str(empty)]) == 1

    def test_vocabulary_violation_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("image_id,gender,label,encoder,family\ni,man,astronaut,e,cnn\n")
        assert main(["zeroshot", "--predictions", str(bad)]) == 1
        assert "astronaut" in capsys.readouterr().err


class TestAccdiffCommand:
    def test_markdown_output(self, capsys):
        assert main(["accdiff", "--accuracy", str(REFERENCE / "accuracy_runs.csv")]) == 0
        out = capsys.readouterr().out
        assert "| cnn average | cnn | 0.11 | 16.90 |" in out

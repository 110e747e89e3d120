"""
Test suite for the zqvae command line.

Run with: pytest tests/test_cli.py
"""

import json

import yaml
from click.testing import CliRunner

from cli.main import EXIT_CHECK_FAILED, EXIT_VALIDATION, VERSION, cli

TINY = {
    "data": {"kind": "swiss-roll", "n": 20, "noise_dims": 1},
    "model": {"n_layers": 1},
    "train": {"epochs": 1, "patience": 1, "seeds": [0], "max_fun_per_epoch": 5},
    "qsvc": {"n_layers": 1},
}


def first_json(text: str) -> dict:
    """Decode the first JSON object in mixed console output."""
    return json.JSONDecoder().raw_decode(text[text.index("{"):])[0]


class TestGen:
    """Dataset bundle generation."""

    def test_synthetic_bundle(self, tmp_path):
        result = CliRunner().invoke(
            cli, ["gen", "--kind", "synthetic-quantum", "--n", "20", "--seed", "1", "--out", str(tmp_path / "sq")]
        )
        assert result.exit_code == 0, result.output
        meta = json.loads((tmp_path / "sq" / "meta.json").read_text())
        assert meta["n_points"] == 20
        assert meta["provenance"]["seed"] == 1

    def test_csv_bundle(self, tmp_path):
        source = tmp_path / "d.csv"
        source.write_text("a,b,y\n1,2,1\n2,1,1\n3,5,-1\n4,2,-1\n")
        result = CliRunner().invoke(
            cli,
            ["gen", "--kind", "csv", "--path", str(source), "--label-column", "y", "--out", str(tmp_path / "b")],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "b" / "labels.csv").exists()

    def test_csv_without_path(self, tmp_path):
        result = CliRunner().invoke(cli, ["gen", "--kind", "csv", "--out", str(tmp_path / "b")])
        assert result.exit_code == EXIT_VALIDATION
        assert "data.path" in result.output

    def test_missing_out_is_usage_error(self):
        result = CliRunner().invoke(cli, ["gen", "--kind", "swiss-roll"])
        assert result.exit_code == 2
        assert "--out" in result.output


class TestTrain:
    """Training runs from a config file."""

    def test_single_run(self, tmp_path):
        config = tmp_path / "tiny.yaml"
        config.write_text(yaml.safe_dump(TINY))
        result = CliRunner().invoke(cli, ["train", "--config", str(config), "--out", str(tmp_path / "run")])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "run" / "metrics.json").exists()

    def test_sweep_then_report(self, tmp_path):
        config = tmp_path / "tiny.yaml"
        config.write_text(yaml.safe_dump(TINY))
        runner = CliRunner()
        result = runner.invoke(
            cli, ["train", "--config", str(config), "--out", str(tmp_path / "runs"), "--sweep", "beta=0,1"]
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "runs" / "beta=1" / "metrics.json").exists()
        result = runner.invoke(cli, ["report", str(tmp_path / "runs"), "--out", str(tmp_path / "report")])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "report" / "summary.csv").exists()

    def test_bad_config_value(self, tmp_path):
        config = tmp_path / "bad.yaml"
        config.write_text("objective:\n  reg: wasserstein\n")
        result = CliRunner().invoke(cli, ["train", "--config", str(config), "--out", str(tmp_path / "run")])
        assert result.exit_code == EXIT_VALIDATION
        assert "objective.reg" in result.output

    def test_missing_config(self, tmp_path):
        result = CliRunner().invoke(
            cli, ["train", "--config", str(tmp_path / "none.yaml"), "--out", str(tmp_path / "run")]
        )
        assert result.exit_code == EXIT_VALIDATION


class TestCheck:
    """Property suites from the command line."""

    def test_passing_suites(self):
        result = CliRunner().invoke(cli, ["check", "--trials", "5", "--seed", "0"])
        assert result.exit_code == 0, result.output
        assert "PASS" in result.output

    def test_json_report(self, tmp_path):
        out = tmp_path / "check.json"
        result = CliRunner().invoke(
            cli, ["check", "--trials", "2", "--suite", "divergence", "--json", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert first_json(result.output)["passed"] is True
        assert json.loads(out.read_text())["suites"][0]["name"] == "divergence"

    def test_injected_fault_fails(self):
        result = CliRunner().invoke(cli, ["check", "--trials", "2", "--suite", "cptp", "--inject-fault"])
        assert result.exit_code == EXIT_CHECK_FAILED
        assert "FAIL" in result.output


class TestReportAndVersion:
    def test_report_on_empty_directory(self, tmp_path):
        result = CliRunner().invoke(cli, ["report", str(tmp_path), "--out", str(tmp_path / "r")])
        assert result.exit_code == EXIT_VALIDATION
        assert "No completed runs" in result.output

    def test_version_command(self):
        result = CliRunner().invoke(cli, ["version"])
        assert result.exit_code == 0
        assert VERSION in result.output

    def test_version_option(self):
        result = CliRunner().invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert VERSION in result.output

"""Tests for the shadowrank command line."""

import json
import math
import shutil
import tempfile
from pathlib import Path

import pytest
from click.testing import CliRunner

from shadowrank import __version__
from shadowrank.main import cli
from shadowrank.shadow import shadow_discs_closed_form


class TestCli:
    """Test cases for CLI commands and exit codes."""

    def setup_method(self):
        """Set up test fixtures."""
        self.temp_dir = Path(tempfile.mkdtemp())
        self.runner = CliRunner()
        self.settings = self.temp_dir / "shadowrank.yaml"
        self.settings.write_text("logging:\n  level: WARNING\n", encoding="utf-8")
        self.out = self.temp_dir / "results"

    def teardown_method(self):
        """Clean up test fixtures."""
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def write_json(self, name: str, data) -> str:
        path = self.temp_dir / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    def invoke(self, *args):
        return self.runner.invoke(cli, ["-s", str(self.settings), *args])

    def test_version(self):
        """Test the version flag."""
        result = self.runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert f"shadowrank v{__version__}" in result.output

    def test_experiments_listing(self):
        """Test every pipeline is listed."""
        result = self.invoke("experiments")
        assert result.exit_code == 0
        assert "discs-methods" in result.output
        assert "line-modes" in result.output

    def test_missing_settings_file(self):
        """Test an explicit missing settings file is a config error."""
        result = self.runner.invoke(cli, ["-s", str(self.temp_dir / "missing.yaml"), "experiments"])
        assert result.exit_code == 2

    def test_logging_settings_applied(self, monkeypatch):
        """Test the level and format from the settings file reach the logging setup."""
        calls = []
        monkeypatch.setattr("shadowrank.main.setup_logging", lambda *args: calls.append(args))
        self.settings.write_text("logging:\n  level: ERROR\n  format: '%(levelname)s %(message)s'\n", encoding="utf-8")
        assert self.invoke("experiments").exit_code == 0
        assert calls == [("ERROR", "%(levelname)s %(message)s")]

    def test_config_show(self):
        """Test the settings overview."""
        result = self.invoke("config-show")
        assert result.exit_code == 0
        assert "Sampling density: 4 points/λ" in result.output

    def test_shadow_closed_form_discs(self):
        """Test the disc closed form is printed as a JSON estimate."""
        path = self.write_json("discs.json", {"shape": "parallel-discs", "a": 2.5, "d": 2.5, "lambda": 1.0})
        result = self.invoke("shadow", "--config", path, "--method", "closed-form")
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert set(data) == {"value", "kind", "dof", "method", "rel_err_est", "wavelength"}
        assert data["kind"] == "area"
        assert data["method"] == "closed-form"
        assert data["dof"] == pytest.approx(shadow_discs_closed_form(2.5, 2.5).dof)

    def test_shadow_vector_doubles_dof(self):
        """Test --vector reports twice the scalar predictor."""
        path = self.write_json("lines.json", {"shape": "parallel-lines", "a": 4.0, "d": 4.0, "lambda": 1.0})
        scalar = json.loads(self.invoke("shadow", "--config", path).stdout)
        vector = json.loads(self.invoke("shadow", "--config", path, "--vector").stdout)
        assert scalar["kind"] == "length"
        assert scalar["method"] == "los-integral"
        assert scalar["dof"] == pytest.approx(8 * math.sqrt(2) - 8, rel=1e-3)
        assert vector["dof"] == pytest.approx(2 * scalar["dof"])
        assert vector["value"] == scalar["value"]

    def test_shadow_text(self):
        """Test the human-readable output compares against the closed form."""
        path = self.write_json("lines.json", {"shape": "parallel-lines", "a": 4.0, "d": 4.0, "lambda": 1.0})
        result = self.invoke("shadow", "--config", path, "--text")
        assert result.exit_code == 0
        assert "Shadow length" in result.output
        assert "Closed form" in result.output

    def test_shadow_numeric_failures(self):
        """Test unavailable closed forms and unsupported sweeps exit with 3."""
        plates = self.write_json("plates.json", {"shape": "parallel-plates", "a": 1.0, "d": 1.0, "lambda": 1.0})
        assert self.invoke("shadow", "--config", plates, "--method", "closed-form").exit_code == 3
        lines = self.write_json("lines.json", {"shape": "parallel-lines", "a": 4.0, "d": 4.0, "lambda": 1.0})
        assert self.invoke("shadow", "--config", lines, "--method", "sweep").exit_code == 3

    def test_bad_geometry_files(self):
        """Test malformed JSON, unknown keys and missing wavelengths exit with 2."""
        bad = self.temp_dir / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert self.invoke("shadow", "--config", str(bad)).exit_code == 2
        unknown = self.write_json("unknown.json", {"shape": "parallel-lines", "a": 4.0, "colour": "red", "lambda": 1})
        assert self.invoke("shadow", "--config", unknown).exit_code == 2
        no_wavelength = self.write_json("nowl.json", {"shape": "parallel-lines", "a": 4.0, "d": 4.0})
        assert self.invoke("shadow", "--config", no_wavelength).exit_code == 2
        overlap = self.write_json("overlap.json", {"shape": "parallel-lines", "a": 4.0, "d": 0.0, "lambda": 1.0})
        assert self.invoke("shadow", "--config", overlap).exit_code == 2

    def test_wavelength_option(self):
        """Test --wavelength supplies a missing wavelength."""
        path = self.write_json("nowl.json", {"shape": "parallel-lines", "a": 4.0, "d": 4.0})
        result = self.invoke("shadow", "--config", path, "--wavelength", "1.0")
        assert result.exit_code == 0

    def test_spectrum(self):
        """Test spectrum and rank report files."""
        path = self.write_json("lines.json", {"shape": "parallel-lines", "a": 4.0, "d": 4.0, "lambda": 1.0})
        result = self.invoke("spectrum", "--config", path, "--tau", "1e-6", "--out", str(self.out))
        assert result.exit_code == 0, result.output
        case_dir = self.out / "spectrum" / "parallel_lines_a4_d4_2d"
        lines = (case_dir / "spectrum.csv").read_text().splitlines()
        assert lines[0] == "n,sigma,sigma_norm"
        assert len(lines) == 17
        ranks = json.loads((case_dir / "ranks.json").read_text())
        assert set(ranks) == {"case_id", "knee_pred", "knee_detected", "ranks", "remainder_width"}
        assert ranks["case_id"] == "parallel_lines_a4_d4_2d"
        assert set(ranks["ranks"]) == {"0.001", "1e-06", "1e-09", "1e-12"}
        assert list(ranks["remainder_width"]) == ["1e-06"]
        expected = max(0, ranks["ranks"]["1e-06"] - round(ranks["knee_pred"]))
        assert ranks["remainder_width"]["1e-06"] == expected
        assert "tau=1e-06" in result.output

    def test_spectrum_dump_block(self):
        """Test the dense block dump and its sidecar."""
        path = self.write_json("lines.json", {"shape": "parallel-lines", "a": 4.0, "d": 4.0, "lambda": 1.0})
        dump = self.temp_dir / "block.bin"
        result = self.invoke(
            "spectrum", "--config", path, "--tau", "1e-3", "--out", str(self.out), "--dump-block", str(dump)
        )
        assert result.exit_code == 0, result.output
        assert dump.stat().st_size == 16 * 16 * 8

    def test_run_without_name(self):
        """Test a missing experiment name lists the choices."""
        result = self.invoke("run", "--out", str(self.out))
        assert result.exit_code == 2
        assert "discs-methods" in result.output

    def test_run_unknown_experiment(self):
        """Test unknown experiment names are config errors."""
        assert self.invoke("run", "nope", "--out", str(self.out)).exit_code == 2

    def test_run_custom(self):
        """Test a custom run writes its summary."""
        path = self.write_json(
            "exp.json",
            {"name": "custom", "geometries": [{"shape": "parallel-lines", "a": 4.0, "d": 4.0}], "taus": [1e-6]},
        )
        result = self.invoke("run", "--config", path, "--out", str(self.out), "--no-plot")
        assert result.exit_code == 0, result.output
        summary = json.loads((self.out / "custom" / "summary.json").read_text())
        assert summary["experiment"] == "custom"
        assert summary["cases"][0]["case_id"] == "parallel_lines_a4_d4_2d"
        assert not list(self.out.rglob("*.svg"))
        assert "custom complete" in result.output

    def test_run_invalid_experiment_config(self):
        """Test unknown experiment keys are config errors."""
        path = self.write_json("exp.json", {"name": "custom", "colour": "red"})
        assert self.invoke("run", "--config", path, "--out", str(self.out)).exit_code == 2

    def test_analyze(self):
        """Test the single-geometry analysis writes maps and plots."""
        path = self.write_json("lines.json", {"shape": "parallel-lines", "a": 4.0, "d": 4.0, "lambda": 1.0})
        result = self.invoke("analyze", "--config", path, "--out", str(self.out))
        assert result.exit_code == 0, result.output
        case_dir = self.out / "custom" / "parallel_lines_a4_d4_2d"
        assert (case_dir / "map_remainder.csv").exists()
        assert (case_dir / "map_remainder.svg").exists()
        assert "edge_concentration_aperture" in result.output

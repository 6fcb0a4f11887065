"""
Unit tests for the console entry point and its exit statuses.
"""

import json
import logging

import pytest

from j1j2bench.cli.output import RecordBuilder
from j1j2bench.errors import ConfigError, NewtonDivergenceError, PolePointError
from j1j2bench.main import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, JsonFormatter, error_record, main


def last_json_line(text: str) -> dict:
    lines = [line for line in text.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


@pytest.mark.unit
class TestMain:
    """Test exit codes, written files and error records."""

    def test_success_writes_files(self, tmp_path, capsys):
        code = main(["ed", "--eta", "0.8", "--output", str(tmp_path)])
        assert code == EXIT_OK
        out = capsys.readouterr().out.split()
        assert out == [str(tmp_path / "ed.csv"), str(tmp_path / "ed.json")]
        payload = json.loads((tmp_path / "ed.json").read_text(encoding="utf-8"))
        assert payload["command"] == "ed"
        assert payload["inputs"]["sources"]["eta"] == "flag"

    def test_missing_eta_is_config_error(self, capsys):
        assert main(["ed"]) == EXIT_CONFIG
        record = last_json_line(capsys.readouterr().err)
        assert record["error"] == "ConfigError"
        assert record["exit_code"] == EXIT_CONFIG
        assert record["diagnostics"]["field"] == "eta"

    def test_short_cutoff_is_numerical(self, tmp_path, capsys):
        argv = ["excite", "--eta-plus", "0.6", "--b", "0.2", "--branch", "e2", "--mu", "0.3", "--omega-max", "1"]
        assert main(argv + ["--output", str(tmp_path)]) == EXIT_NUMERICAL
        record = last_json_line(capsys.readouterr().err)
        assert record["error"] == "SeriesConvergenceError"
        assert record["diagnostics"]["omega_max"] == 1
        assert not any(tmp_path.iterdir())

    def test_json_output_only(self, tmp_path, capsys):
        argv = ["excite", "--eta-plus", "0.6", "--b", "0.2", "--branch", "e2", "--mu", "0.3"]
        assert main(argv + ["--output", str(tmp_path), "--format", "json"]) == EXIT_OK
        assert [p.name for p in tmp_path.iterdir()] == ["excite.json"]


@pytest.mark.unit
class TestErrorRecord:
    """Test error serialization."""

    def test_workbench_error(self):
        record = error_record(PolePointError("pole", {"u": 0.1}), EXIT_NUMERICAL)
        assert record == {"error": "PolePointError", "message": "pole", "diagnostics": {"u": 0.1}, "exit_code": 3}

    def test_config_error(self):
        assert error_record(ConfigError("bad"), EXIT_CONFIG)["exit_code"] == 2

    def test_unexpected_error(self):
        assert error_record(RuntimeError("boom"), 1)["error"] == "RuntimeError"

    def test_json_formatter(self):
        record = logging.LogRecord("j1j2bench", logging.INFO, __file__, 1, "hello %s", ("world",), None)
        assert json.loads(JsonFormatter().format(record))["message"] == "hello world"


@pytest.mark.unit
class TestExitMapping:
    """Test exit-status mapping with the handlers patched out."""

    def test_numerical_failure(self, mocker, capsys):
        mocker.patch("j1j2bench.main.run", side_effect=NewtonDivergenceError("stalled", {"iterations": 60}))
        assert main(["bae-solve", "--eta", "0.8"]) == EXIT_NUMERICAL
        record = last_json_line(capsys.readouterr().err)
        assert record["diagnostics"] == {"iterations": 60}

    def test_failed_check_under_strict(self, mocker, tmp_path, capsys):
        record = RecordBuilder("reproduce", {}, target="texture-ferro").check("low_state_delta", 0.2, 5e-3, False).build()
        mocker.patch("j1j2bench.main.run", return_value=record)
        argv = ["reproduce", "texture-ferro", "--output", str(tmp_path)]
        assert main(argv) == EXIT_OK
        assert main(argv + ["--strict"]) == EXIT_NUMERICAL
        assert (tmp_path / "texture-ferro.json").exists()
        assert "low_state_delta" in last_json_line(capsys.readouterr().err)["diagnostics"]

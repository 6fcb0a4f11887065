"""
Integration tests for the reproduction targets and the end-to-end CLI run.
"""

import json
import math
from pathlib import Path

import pytest

from j1j2bench.cli.reproduce import TARGETS, run_target
from j1j2bench.main import EXIT_OK, main

GOLDEN = Path(__file__).resolve().parent.parent / "golden" / "record_keys.json"


def failed_checks(record) -> dict:
    return {name: check for name, check in record.checks.items() if not check.passed}


@pytest.mark.integration
class TestRecordShape:
    """Test emitted keys against the golden listing."""

    @pytest.mark.parametrize("target", sorted(json.loads(GOLDEN.read_text(encoding="utf-8"))))
    def test_keys(self, target):
        expected = json.loads(GOLDEN.read_text(encoding="utf-8"))[target]
        record = run_target(target, {})
        assert sorted(record.columns) == expected["columns"]
        assert sorted(record.scalars) == expected["scalars"]
        assert sorted(record.checks) == expected["checks"]
        assert record.target == target


@pytest.mark.integration
class TestFastTargets:
    """Test the targets that run in seconds."""

    @pytest.mark.parametrize("target", ["texture-ferro", "texture-neel"])
    def test_textures(self, target):
        record = run_target(target, {})
        assert not failed_checks(record)
        assert len(record.columns["delta"]) == 16

    def test_near_degenerate(self):
        record = run_target("near-degenerate", {})
        assert not failed_checks(record)
        assert len(record.columns["delta_e"]) == 14
        assert len(record.scalars["distinct_delta_e"]) == 7

    def test_qpt_derivative(self):
        record = run_target("qpt-derivative", {})
        assert not failed_checks(record)
        assert record.scalars["critical_b"] == pytest.approx(math.pi / 4, abs=0.01)


@pytest.mark.integration
@pytest.mark.slow
class TestScalingTargets:
    """Test the finite-size scaling targets (diagonalizations up to 2N = 12)."""

    @pytest.mark.parametrize(
        "target",
        [
            "ground-scaling-real",
            "excitation-scaling-real",
            "ground-scaling-ipi",
            "excitation-scaling-ipi",
            "excitation-scaling-ipi-phase2",
        ],
    )
    def test_target_passes(self, target):
        record = run_target(target, {})
        assert not failed_checks(record), failed_checks(record)


@pytest.mark.integration
class TestEndToEnd:
    """Test full CLI runs."""

    def test_every_target_registered(self):
        assert len(TARGETS) == 10

    def test_strict_reproduce(self, tmp_path, capsys):
        code = main(["reproduce", "texture-ferro", "--strict", "--output", str(tmp_path)])
        assert code == EXIT_OK
        payload = json.loads((tmp_path / "texture-ferro.json").read_text(encoding="utf-8"))
        assert all(check["passed"] for check in payload["checks"].values())

    def test_runs_are_byte_identical(self, tmp_path, capsys):
        argv = ["thermo", "--eta-plus", "0.6", "--b", "0.2", "--two-n", "8", "--output", str(tmp_path)]
        assert main(argv) == EXIT_OK
        first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
        assert main(argv) == EXIT_OK
        second = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
        assert first == second
        assert set(first) == {"thermo.csv", "thermo.json"}

"""Integration tests running whole suites through the command line."""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

from scripts import verifyctl
from config import SUITE_NAMES


@pytest.fixture
def runner():
    return CliRunner()


def _verify(runner, out_dir, *args):
    return runner.invoke(verifyctl.cli, ["verify", *args, "--out-dir", str(out_dir), "--no-timing"])


@pytest.mark.integration
class TestVerifyRuns:
    """Full suites with reduced sizes."""

    def test_exact_suites(self, runner, temp_directory):
        """Heisenberg and Virasoro tables pass at n_max = 2."""
        result = _verify(runner, temp_directory, "heisenberg", "virasoro", "--n-max", "2", "--k-trunc", "8")
        assert result.exit_code == verifyctl.EXIT_OK, result.output
        virasoro = json.loads((temp_directory / "virasoro.json").read_text())
        ids = {c["check_id"] for c in virasoro["checks"]}
        assert "central-vacuum[+02,-02]" in ids
        assert "central-covariant[+01,-01]" in ids
        assert virasoro["config"]["K"] == 8

    def test_byte_identical_reports(self, runner, temp_directory):
        """Same seed and --no-timing reproduce the report byte for byte."""
        first, second = temp_directory / "a", temp_directory / "b"
        for out in (first, second):
            result = _verify(runner, out, "propagators", "zeta", "--seed", "17")
            assert result.exit_code == verifyctl.EXIT_OK, result.output
        for name in ("propagators", "zeta"):
            assert (first / f"{name}.json").read_bytes() == (second / f"{name}.json").read_bytes()

    def test_routes(self, runner, temp_directory):
        result = _verify(runner, temp_directory, "routes", "--n-max", "2", "--k-trunc", "8", "--band-limit", "4")
        assert result.exit_code == verifyctl.EXIT_OK, result.output
        report = json.loads((temp_directory / "routes.json").read_text())
        assert any(c["check_id"].startswith("B-star-hbar2") for c in report["checks"])

    def test_config_file_run(self, runner, temp_directory):
        """Flags override values read from the config file."""
        ini = temp_directory / "run.ini"
        ini.write_text("[run]\nn_max = 3\nK = 12\nseed = 1\n")
        result = runner.invoke(verifyctl.cli, ["verify", "heisenberg", "--config", str(ini), "--n-max", "1",
                                               "--out-dir", str(temp_directory)])
        assert result.exit_code == verifyctl.EXIT_OK, result.output
        report = json.loads((temp_directory / "heisenberg.json").read_text())
        assert report["config"]["n_max"] == 1
        assert report["config"]["K"] == 12
        assert report["seed"] == 1

    def test_all_suites_slow(self, runner, temp_directory):
        """Every registered suite passes at its defaults."""
        result = _verify(runner, temp_directory, *SUITE_NAMES)
        assert result.exit_code == verifyctl.EXIT_OK, result.output
        assert sorted(p.stem for p in temp_directory.glob("*.json")) == sorted(SUITE_NAMES)


@pytest.mark.integration
class TestKernelDumps:
    """Kernel CSV output through the command line."""

    @pytest.mark.parametrize("name", ["e-mink", "e-cyl", "w-cyl", "diag-diff"])
    def test_dump(self, runner, temp_directory, name):
        out = temp_directory / f"{name}.csv"
        result = runner.invoke(verifyctl.cli, ["dump-kernel", name, "--grid", "6", "--out", str(out)])
        assert result.exit_code == verifyctl.EXIT_OK, result.output
        assert len(out.read_text().splitlines()) == 37


@pytest.mark.integration
class TestScriptInvocation:
    """The script runs as documented, outside of pytest's sys.path setup."""

    SCRIPT = Path(__file__).resolve().parents[2] / "scripts" / "verifyctl.py"

    def test_direct_script(self, temp_directory):
        env = {**os.environ, "CYLVERIFY_LOG_FILE": str(temp_directory / "cylverify.log")}
        env.pop("PYTHONPATH", None)
        result = subprocess.run(
            [sys.executable, str(self.SCRIPT), "verify", "heisenberg", "--n-max", "1", "--k-trunc", "4",
             "--out-dir", str(temp_directory / "reports"), "--no-timing"],
            cwd=temp_directory, env=env, capture_output=True, text=True, timeout=300,
        )
        assert result.returncode == verifyctl.EXIT_OK, result.stderr
        report = json.loads((temp_directory / "reports" / "heisenberg.json").read_text())
        assert len(report["checks"]) == 9

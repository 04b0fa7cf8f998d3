"""Unit tests for utils.py validation and file helpers."""

import csv
import json
import logging
import os
from pathlib import Path
from unittest.mock import patch

import pytest

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from utils import (
    atomic_write_text,
    configure_logging,
    sanitize_path,
    validate_kernel_name,
    validate_suite_names,
    write_csv_atomic,
    write_json_atomic,
)


class TestValidateSuiteNames:
    """Test the validate_suite_names function."""

    def test_known_names(self):
        """Test that registered suites pass."""
        assert validate_suite_names(["heisenberg", "zeta"]) is True

    def test_empty(self):
        """Test that an empty selection is refused."""
        with pytest.raises(ValueError, match="At least one"):
            validate_suite_names([])

    def test_unknown(self):
        """Test that every unknown name is reported."""
        with pytest.raises(ValueError, match="bogus, other"):
            validate_suite_names(["heisenberg", "bogus", "other"])


class TestValidateKernelName:
    """Test the validate_kernel_name function."""

    @pytest.mark.parametrize("name", ["e-mink", "e-cyl", "w-cyl", "diag-diff"])
    def test_known(self, name):
        assert validate_kernel_name(name) is True

    def test_unknown(self):
        with pytest.raises(ValueError, match="Unknown kernel 'e-ads'"):
            validate_kernel_name("e-ads")


class TestSanitizePath:
    """Test path sanitization."""

    def test_strips_null_bytes(self):
        assert "\0" not in str(sanitize_path("rep\0orts"))

    def test_absolute(self):
        assert sanitize_path("reports").is_absolute()

    def test_expands_home(self):
        assert sanitize_path("~/x") == Path.home().resolve() / "x"


class TestAtomicWrites:
    """Test temp-file-then-rename writes."""

    def test_creates_parents(self, temp_directory):
        """Test that missing directories are created."""
        path = atomic_write_text(temp_directory / "a" / "b.txt", "hello\n")
        assert path.read_text() == "hello\n"

    def test_no_temp_left(self, temp_directory):
        """Test that only the target remains after a write."""
        atomic_write_text(temp_directory / "r.json", "{}")
        assert [p.name for p in temp_directory.iterdir()] == ["r.json"]

    def test_overwrites(self, temp_directory):
        path = temp_directory / "r.txt"
        atomic_write_text(path, "old")
        atomic_write_text(path, "new")
        assert path.read_text() == "new"

    def test_failure_cleans_up(self, temp_directory):
        """Test that a failed rename leaves no temp file and keeps the old content."""
        path = temp_directory / "r.txt"
        atomic_write_text(path, "old")
        with patch("utils.os.replace", side_effect=OSError("disk full")):
            with pytest.raises(OSError):
                atomic_write_text(path, "new")
        assert path.read_text() == "old"
        assert [p.name for p in temp_directory.iterdir()] == ["r.txt"]

    def test_json(self, temp_directory):
        path = write_json_atomic(temp_directory / "r.json", {"b": 1, "a": [1, 2]})
        text = path.read_text()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1, 2], "b": 1}

    def test_csv(self, temp_directory):
        path = write_csv_atomic(temp_directory / "k.csv", ["x", "y"], [[1, 2], [3, 4]])
        with open(path, newline="") as handle:
            assert list(csv.reader(handle)) == [["x", "y"], ["1", "2"], ["3", "4"]]


class TestConfigureLogging:
    """Test logging setup."""

    def test_writes_log_file(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        configure_logging("DEBUG", log_file)
        logging.getLogger("cylinder.test").debug("sample message")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "sample message" in log_file.read_text()

    def test_level(self, tmp_path):
        configure_logging("warning", tmp_path / "run.log")
        assert logging.getLogger().level == logging.WARNING

    def test_unwritable_log_file(self, tmp_path):
        """Test that console logging survives a log path that cannot be created."""
        blocker = tmp_path / "file"
        blocker.write_text("")
        configure_logging("INFO", blocker / "run.log")
        assert logging.getLogger().handlers

"""Pytest configuration and shared fixtures for cylinder-verify tests."""

import os
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'scripts'))

from cylinder.conformal import CircleDiffeo
from cylinder.functionals import ChiralConfig, TestFnCircle


@pytest.fixture
def rng():
    """Seeded generator so randomized tests replay."""
    return np.random.default_rng(20240601)


@pytest.fixture
def temp_directory():
    """Create a temporary directory for tests."""
    temp_dir = tempfile.mkdtemp()
    yield Path(temp_dir)
    shutil.rmtree(temp_dir)


@pytest.fixture
def cos_config():
    """ψ = cos u."""
    return ChiralConfig.from_real_coefficients([0.0, 1.0], [0.0, 0.0])


@pytest.fixture
def random_configs(rng):
    """Band-limited configurations with band 8."""
    return [ChiralConfig.random(8, rng) for _ in range(5)]


@pytest.fixture
def random_test_fn(rng):
    return TestFnCircle.random_real(3, rng)


@pytest.fixture
def sine_diffeo():
    """μ(u) = u + 0.1 sin u."""
    return CircleDiffeo([(1, 0.0, 0.1)])


@pytest.fixture
def random_diffeos(rng):
    return [CircleDiffeo.random(rng) for _ in range(3)]


@pytest.fixture(autouse=True)
def isolated_log_file(tmp_path, monkeypatch):
    """Keep log output of CLI runs out of the home directory."""
    monkeypatch.setattr('utils.LOG_FILE', tmp_path / "cylverify.log")


def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers based on file paths."""
    for item in items:
        if "integration" in str(item.fspath):
            item.add_marker(pytest.mark.integration)
        elif "unit" in str(item.fspath):
            item.add_marker(pytest.mark.unit)

        if "slow" in item.name or "integration" in str(item.fspath):
            item.add_marker(pytest.mark.slow)


def assert_close(actual, expected, tol, relative=True):
    """Assert |actual - expected| <= tol, scaled by max(1, |expected|) when relative."""
    actual = np.asarray(actual, dtype=complex)
    expected = np.asarray(expected, dtype=complex)
    scale = np.maximum(1.0, np.abs(expected)) if relative else 1.0
    err = np.max(np.abs(actual - expected) / scale)
    assert err <= tol, f"error {err:.3e} exceeds {tol:g}"


# Make custom assertions available to tests
pytest.assert_close = assert_close

"""
Pytest fixtures and utilities for mpdetect tests
"""
import os
import sys
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

# Add the parent directory to the path so we can import mpdetect
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from mpdetect.channel import complex_normal, noise_power  # noqa: E402
from mpdetect.constellation import make_qam  # noqa: E402
from mpdetect.harness.config import ExperimentConfig  # noqa: E402


@pytest.fixture
def qam4():
    return make_qam(4)


@pytest.fixture
def qam16():
    return make_qam(16)


@pytest.fixture
def qam64():
    return make_qam(64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_system():
    """Factory for an i.i.d. Rayleigh system ``y = A x + w``.

    Returns (A, x_true, tx_indices, y, N0).
    """
    def _make(cons, M, N, esn0_db, rng, noiseless=False):
        A = complex_normal(rng, (N, M))
        idx = rng.integers(0, cons.order, size=M)
        x = cons.points[idx]
        N0 = noise_power(cons.energy, esn0_db)
        w = np.zeros(N) if noiseless else np.sqrt(N0) * complex_normal(rng, N)
        return A, x, idx, A @ x + w, N0
    return _make


@pytest.fixture
def isolated_env(monkeypatch, tmp_path):
    """Run in an empty directory with no .env and no MPDETECT_* variables."""
    for key in ("MPDETECT_WORKERS", "MPDETECT_OUTPUT", "MPDETECT_SEED", "MPDETECT_LOG_FILE"):
        monkeypatch.delenv(key, raising=False)
    work = tmp_path / "work"
    work.mkdir()
    monkeypatch.chdir(work)
    config_dir = tmp_path / "config"
    config_dir.mkdir()
    with patch('mpdetect.utils.config.get_config_dir', return_value=config_dir):
        yield work


@pytest.fixture
def small_config(tmp_path):
    """A configuration small enough to run every sweep in well under a second."""
    return ExperimentConfig(
        M=4, N=8, Q=4,
        rho=[0.0, 0.5],
        esn0_db=[0.0, 10.0],
        T=4,
        iteration_counts=[2, 4],
        algorithms=["gabp+add", "gamp", "lmmse", "mfb"],
        trials=20,
        chunk_size=5,
        snapshot_ts=[1, 3],
        histogram_t=3,
        output=str(tmp_path / "out" / "run"),
    ).validate()


@pytest.fixture
def config_file(tmp_path):
    """Write a JSON config file and return its path."""
    import json

    def _write(data, name="experiment.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path
    return _write

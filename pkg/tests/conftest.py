"""Shared pytest fixtures for polar-reading tests"""

import json

import numpy as np
import pytest

from polar_reading.cell import ProbeState, ad_cell
from polar_reading.polar import polar_transform, source_table


@pytest.fixture
def rng():
    """Seeded generator so property loops are reproducible"""
    return np.random.default_rng(20240611)


@pytest.fixture
def orthogonal_cell():
    """Identity vs full damping: |1> is read out perfectly"""
    return ad_cell(0.0, 1.0, 0.5)


@pytest.fixture
def ad_half_cell():
    """Identity vs half damping, the reference cell for polarization runs"""
    return ad_cell(0.0, 0.5, 0.5)


@pytest.fixture
def identical_cell():
    """Both labels apply the same channel"""
    return ad_cell(0.3, 0.3, 0.5)


@pytest.fixture
def ket1():
    return ProbeState.ket1()


@pytest.fixture
def mock_env_vars(monkeypatch):
    """Mock environment variables for settings"""
    monkeypatch.setenv("POLAR_READING_THREADS", "2")
    monkeypatch.setenv("POLAR_READING_MAX_EXACT_N", "8")
    monkeypatch.setenv("POLAR_READING_MAX_TABLE_N", "16")
    monkeypatch.setenv("POLAR_READING_MAX_TRANSFORM_LEVEL", "12")
    monkeypatch.setenv("POLAR_READING_LOG_LEVEL", "WARNING")
    return monkeypatch


@pytest.fixture
def clear_caches():
    """Drop memoized transforms and source tables so capacity checks run again"""
    polar_transform.cache_clear()
    source_table.cache_clear()
    yield
    polar_transform.cache_clear()
    source_table.cache_clear()


@pytest.fixture
def write_config(tmp_path):
    """Write a config document to a temp file, pointing out_dir inside tmp_path"""

    def _write(data: dict, name: str = "config.json") -> str:
        doc = {"out_dir": str(tmp_path / "results"), **data}
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return _write

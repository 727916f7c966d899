"""Pytest configuration and fixtures."""

import json

import pytest

from src.config import Settings
from src.physics.model import baseline_system, difference_pump, sum_pump
from src.schemas import InitialConditions


@pytest.fixture
def test_settings(tmp_path):
    """Provide settings that don't depend on the environment."""
    return Settings(out_dir=tmp_path / "out", jobs=1, log_level="WARNING")


@pytest.fixture
def dpa_system():
    """Baseline modes with χ_eχ_g < 0."""
    return baseline_system(-1)


@pytest.fixture
def opa_system():
    """Baseline modes with χ_eχ_g > 0."""
    return baseline_system(1)


@pytest.fixture
def dpa_pump(dpa_system):
    return difference_pump(dpa_system)


@pytest.fixture
def opa_pump(opa_system):
    return sum_pump(opa_system)


@pytest.fixture
def unit_init():
    return InitialConditions.of(1.0)


@pytest.fixture
def run_config():
    """Baseline DPA run in the JSON layout accepted by `pwl simulate`."""
    return {
        "omega_e_hz": 1460.0,
        "omega_g_hz": 1240.0,
        "chi_e": 1.0625e6,
        "chi_g": -1.0625e6,
        "pump": {"a0": 1.0, "nu_hz": 220.0, "phi_rad": 0.0},
        "init": {"e0_re": 1.0},
        "t_end_s": 0.05,
        "dt_s": 1e-4,
    }


@pytest.fixture
def write_config(tmp_path):
    """Write a JSON payload into tmp_path and return its path."""

    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write

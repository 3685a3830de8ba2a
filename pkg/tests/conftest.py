"""
Shared pytest fixtures for slowlight tests.

This module provides the atomic media, drives, grids and scenario
configurations used across unit and integration tests.
"""

import math
import os

import pytest

from slowlight.models import (
    AtomicSystem,
    DriveConfig,
    GridConfig,
    PulseConfig,
    ScenarioConfig,
    TimeGrid,
)
from slowlight.physics import derive_params

# Transverse rate Gamma = gamma2 / 2 = 2 pi x 3 MHz
GAMMA = 2 * math.pi * 3e6


# ==============================================================================
# Environment Setup
# ==============================================================================

@pytest.fixture(scope="session", autouse=True)
def test_env():
    """Set up test environment variables."""
    # Suppress logs during tests
    os.environ["LOG_LEVEL"] = "ERROR"
    os.environ.pop("SLOWLIGHT_LOG_FILE", None)
    os.environ.pop("SLOWLIGHT_JOBS", None)

    yield


# ==============================================================================
# Media and Drives
# ==============================================================================

@pytest.fixture
def gamma():
    """Reference rate for the _in_gamma convention."""
    return GAMMA


@pytest.fixture
def rb87_atoms():
    """87Rb medium of the numerical example: L = 1.6 mm, N = 1e13 cm^-3."""
    return AtomicSystem(
        gamma1=2 * math.pi * 6e6,
        gamma2=2 * math.pi * 6e6,
        gamma3=2 * math.pi * 5.75e6,
        lambda1=780e-9,
        lambda2=1.47e-6,
        coupling_ratio=0.96,
        density=1e19,
        length=1.6e-3,
    )


@pytest.fixture
def rb87_drive():
    """Omega = 8 Gamma, resonant dressing at Omega_0 = Delta = 50 Gamma."""
    return DriveConfig(omega_c=8 * GAMMA, omega_0=50 * GAMMA, delta=50 * GAMMA)


@pytest.fixture
def desk_drive():
    """Strong drive that keeps the desk-scale medium in the adiabatic regime."""
    return DriveConfig(omega_c=200 * GAMMA, omega_0=600 * GAMMA, delta=600 * GAMMA)


@pytest.fixture
def with_beta_length():
    """Factory: copy of a medium whose length gives the requested beta*L."""
    def _make(atoms, drive, beta_length):
        beta = derive_params(atoms, drive).beta
        return atoms.model_copy(update={"length": beta_length / beta})
    return _make


@pytest.fixture
def desk_atoms(rb87_atoms, desk_drive, with_beta_length):
    """Rb87 example medium cut to beta*L = pi/2 under the desk drive (about 1.8 mm)."""
    return with_beta_length(rb87_atoms, desk_drive, math.pi / 2)


# ==============================================================================
# Grids and Scenarios
# ==============================================================================

@pytest.fixture
def short_grid():
    """120 ns window for 10 ns pulses; enough for the lossless tiers."""
    return TimeGrid(t_start=-60e-9, t_end=60e-9, n_samples=1024)


@pytest.fixture
def desk_grid():
    """Full-tier window for 3 ns pulses: dt * Omega_0 just below 0.1."""
    return TimeGrid(t_start=-18e-9, t_end=18e-9, n_samples=4096)


@pytest.fixture
def desk_config(desk_atoms, desk_drive):
    """Full-tier desk-scale scenario at beta*L = pi/2."""
    return ScenarioConfig(
        atoms=desk_atoms,
        drive=desk_drive,
        pulse=PulseConfig(width=3e-9),
        grid=GridConfig(t_start=-18e-9, t_end=18e-9, n_samples=4096, n_z=128),
        tier="full",
    )


@pytest.fixture
def analytic_config(desk_config):
    """Desk scenario on a coarse grid, analytic tier."""
    return desk_config.model_copy(update={
        "tier": "analytic",
        "grid": GridConfig(t_start=-18e-9, t_end=18e-9, n_samples=1024),
    })


@pytest.fixture
def write_config(tmp_path):
    """Factory: save a ScenarioConfig (or raw text) and return the file path."""
    from slowlight.config_loader import save_config

    def _write(config, name="scenario.cfg"):
        path = tmp_path / name
        if isinstance(config, str):
            path.write_text(config, encoding="utf-8")
        else:
            save_config(config, path)
        return path
    return _write

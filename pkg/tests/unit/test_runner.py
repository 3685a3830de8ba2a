"""
Unit tests for runner.py

Tests time-window sizing against group walk-off, input construction and
runs that start on either carrier.
"""

import math

import pytest

from slowlight.error_utils import ConfigError, GridError
from slowlight.models import DriveConfig, GridConfig, PulseConfig, QubitConfig, ScenarioConfig
from slowlight.runner import build_qubit, build_time_grid, run_qubit, run_scenario, walk_off_margins

GAMMA = 2 * math.pi * 3e6


@pytest.fixture
def walk_off_config(rb87_atoms, with_beta_length):
    """Weak drive with unequal group velocities: walk-off of about 22 ns either way."""
    atoms = rb87_atoms.model_copy(update={"coupling_ratio": math.sqrt(2)})
    drive = DriveConfig(omega_c=200 * GAMMA / 150, omega_0=600 * GAMMA, delta=600 * GAMMA)
    return ScenarioConfig(
        atoms=with_beta_length(atoms, drive, math.pi / 2),
        drive=drive,
        pulse=PulseConfig(width=3e-9),
        tier="reduced",
    )


class TestTimeWindow:
    """Test the default window against group walk-off."""

    def test_default_window_covers_walk_off(self, walk_off_config):
        """Should widen the 6 T window by the walk-off on each side."""
        before, after = walk_off_margins(walk_off_config)
        grid = build_time_grid(walk_off_config)

        assert before == pytest.approx(after, rel=1e-9)
        assert before > 15e-9
        assert grid.t_start == pytest.approx(-18e-9 - before, rel=1e-12)
        assert grid.t_end == pytest.approx(18e-9 + after, rel=1e-12)

    def test_analytic_tier_needs_no_margin(self, walk_off_config):
        """Should keep the plain window for the co-moving closed form."""
        assert walk_off_margins(walk_off_config, "analytic") == (0.0, 0.0)
        grid = build_time_grid(walk_off_config, "analytic")

        assert grid.t_start == pytest.approx(-18e-9, rel=1e-12)

    def test_efficiency_independent_of_window(self, walk_off_config):
        """Should give the same efficiency in the default window and a much wider one."""
        wide = walk_off_config.model_copy(update={"grid": GridConfig(t_start=-180e-9, t_end=180e-9)})

        default_eta = run_scenario(walk_off_config).result.eta
        wide_eta = run_scenario(wide).result.eta

        assert default_eta == pytest.approx(wide_eta, abs=1e-3)

    def test_narrow_window_rejected(self, walk_off_config):
        """Should refuse a window the walked-off field would wrap around."""
        narrow = walk_off_config.model_copy(update={"grid": GridConfig(t_start=-18e-9, t_end=18e-9)})

        with pytest.raises(GridError, match="walk-off"):
            run_scenario(narrow)


class TestInputs:
    """Test photon and qubit construction."""

    def test_qubit_rejects_tabulated_shape(self, analytic_config):
        """Should refuse a file envelope in qubit mode."""
        config = analytic_config.model_copy(update={
            "pulse": PulseConfig(width=3e-9, shape="file", envelope_file="in.csv"),
            "qubit": QubitConfig(tau=200e-9),
        })

        with pytest.raises(ConfigError, match="pulse.shape"):
            build_qubit(config)

    def test_qubit_needs_section(self, analytic_config):
        with pytest.raises(ConfigError, match="qubit section"):
            build_qubit(analytic_config)


class TestReverseDirection:
    """Test runs that start on carrier 2."""

    def test_scenario(self, analytic_config):
        """Should convert completely to carrier 1 at beta*L = pi/2."""
        config = analytic_config.model_copy(update={"pulse": PulseConfig(width=3e-9, carrier=2)})

        run = run_scenario(config)

        assert run.input_carrier == 2
        assert run.result.eta == pytest.approx(1.0, abs=1e-9)
        assert run.result.residual_n1 == pytest.approx(0.0, abs=1e-9)

    def test_qubit(self, analytic_config):
        """Should carry a qubit from carrier 2 to carrier 1 with unit fidelity."""
        config = analytic_config.model_copy(update={
            "pulse": PulseConfig(width=3e-9, carrier=2),
            "qubit": QubitConfig(a_re=0.6, b_im=0.8, tau=20e-9),
            "grid": GridConfig(t_start=-18e-9, t_end=38e-9, n_samples=2048),
        })

        run = run_qubit(config)

        assert run.qubit.bin_profile.carrier == 2
        assert run.result.qubit_fidelity == pytest.approx(1.0, abs=1e-9)
        assert abs(run.result.a_out) == pytest.approx(0.6, abs=1e-6)

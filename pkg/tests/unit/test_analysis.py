"""
Unit tests for analysis.py

Tests intensities, quantum efficiency, efficiency profiles and time-bin
qubit transfer on the lossless tiers.
"""

import cmath
import math

import numpy as np
import pytest

from slowlight.analysis import (
    complete_conversion_residual,
    convert_time_bin_qubit,
    efficiency_profile,
    intensity,
    quantum_efficiency,
)
from slowlight.error_utils import AnalysisError
from slowlight.models import TimeGrid
from slowlight.physics import derive_params
from slowlight.propagation import analytic_history, make_propagation_grid, propagate_reduced
from slowlight.signals import gaussian_pulse, time_bin_qubit, vacuum


@pytest.fixture
def grid():
    return TimeGrid(t_start=-18e-9, t_end=18e-9, n_samples=1024)


@pytest.fixture
def pulse(grid):
    return gaussian_pulse(0.0, 3e-9, grid)


@pytest.fixture
def params(desk_atoms, desk_drive):
    return derive_params(desk_atoms, desk_drive)


def _history(pulse, params, beta_length, n_z=None):
    scaled = params.model_copy(update={"length": beta_length / params.beta})
    return analytic_history(pulse, None, scaled, make_propagation_grid(scaled, n_z=n_z))


class TestIntensity:
    """Test intensities on the grid."""

    def test_vacuum_input(self, pulse, params):
        """Should give zero carrier-2 intensity at z = 0."""
        history = _history(pulse, params, math.pi / 2)

        assert intensity(history, 2, 0.0, history.grid.times[512]) == 0.0

    def test_conversion_profile(self, pulse, params):
        """Should give sin^2(beta z) |f(tau)|^2 at carrier 2."""
        history = _history(pulse, params, math.pi / 2, n_z=10)
        z = history.z[5]
        tau = history.grid.times[500]
        expected = math.sin(history.beta * z) ** 2 * abs(pulse.samples[500]) ** 2

        assert intensity(history, 2, z, tau) == pytest.approx(expected, rel=1e-12)
        assert intensity(history, 1, z, tau) + intensity(history, 2, z, tau) == pytest.approx(
            abs(pulse.samples[500]) ** 2, rel=1e-12
        )


class TestQuantumEfficiency:
    """Test the efficiency law of the lossless tiers."""

    @pytest.mark.parametrize("beta_length, expected", [
        (math.pi / 2, 1.0),
        (math.pi / 4, 0.5),
        (math.pi / 3, 0.75),
    ])
    def test_efficiency_law(self, pulse, params, beta_length, expected):
        """Should give eta = sin^2(beta L)."""
        result = quantum_efficiency(_history(pulse, params, beta_length))

        assert result.eta == pytest.approx(expected, abs=1e-10)
        assert result.eta + result.residual_n1 == pytest.approx(1.0, abs=1e-6)
        assert result.conservation_residual <= 1e-6
        assert result.shape_fidelity == pytest.approx(1.0, abs=1e-9)

    def test_profile_over_half_period(self, pulse, params):
        """Should trace sin^2(beta z) over beta z in [0, pi] from one run."""
        history = _history(pulse, params, math.pi, n_z=32)
        profile = efficiency_profile(history)

        assert len(profile) == 33
        np.testing.assert_allclose(profile["eta"], np.sin(profile["beta_z"]) ** 2, atol=1e-10)
        assert profile["beta_z"].iloc[-1] == pytest.approx(math.pi, rel=1e-12)

    def test_uncoupled_medium(self, pulse, params):
        """Should report eta = 0 and zero fidelity when beta = 0."""
        uncoupled = params.model_copy(update={"beta": 0.0})
        history = propagate_reduced(pulse, None, uncoupled, make_propagation_grid(params))

        result = quantum_efficiency(history)

        assert result.eta == 0.0
        assert result.shape_fidelity == 0.0
        assert result.residual_n1 == pytest.approx(1.0, abs=1e-12)

    def test_empty_input_rejected(self, grid, params):
        """Should reject an input without photons."""
        history = analytic_history(vacuum(grid, carrier=1), None, params, make_propagation_grid(params))

        with pytest.raises(AnalysisError, match="efficiency undefined"):
            quantum_efficiency(history)

    def test_lab_frame_delay(self, pulse, params):
        """Should report L / v_ref for the co-moving analytic solution."""
        history = _history(pulse, params, math.pi / 2)

        assert quantum_efficiency(history).delay == pytest.approx(history.length / history.v_ref, rel=1e-9)

    @pytest.mark.parametrize("beta_length, expected", [
        (math.pi / 2, 0.0),
        (math.pi / 3, 0.5),
    ])
    def test_complete_conversion_residual(self, pulse, params, beta_length, expected):
        """Should give |cos(beta L)|."""
        residual = complete_conversion_residual(_history(pulse, params, beta_length))

        assert residual == pytest.approx(expected, abs=1e-7)

    @pytest.mark.parametrize("beta_length, expected", [
        (math.pi / 2, 1.0),
        (math.pi / 4, 0.5),
    ])
    def test_reverse_direction(self, grid, pulse, params, beta_length, expected):
        """Should convert a carrier-2 photon to carrier 1 with the same law."""
        scaled = params.model_copy(update={"length": beta_length / params.beta})
        second = pulse.with_samples(pulse.samples, carrier=2)
        history = analytic_history(vacuum(grid, carrier=1), second, scaled, make_propagation_grid(scaled))

        result = quantum_efficiency(history, input_carrier=2)
        profile = efficiency_profile(history, input_carrier=2)

        assert result.eta == pytest.approx(expected, abs=1e-10)
        assert result.residual_n1 == pytest.approx(1.0 - expected, abs=1e-10)
        assert result.shape_fidelity == pytest.approx(1.0, abs=1e-9)
        assert profile["eta"].iloc[-1] == pytest.approx(expected, abs=1e-10)


class TestQubitTransfer:
    """Test time-bin qubit conversion on the analytic tier."""

    @pytest.fixture
    def qubit_grid(self):
        return TimeGrid(t_start=-60e-9, t_end=120e-9, n_samples=2048)

    def _convert(self, a, b, qubit_grid, atoms, drive, beta_length, with_beta_length):
        medium = with_beta_length(atoms, drive, beta_length)
        params = derive_params(medium, drive)
        qubit = time_bin_qubit(a, b, 0.0, 10e-9, 50e-9, qubit_grid)
        return convert_time_bin_qubit(qubit, "analytic", medium, drive, make_propagation_grid(params))

    def test_early_bin(self, qubit_grid, rb87_atoms, desk_drive, with_beta_length):
        """Should transfer (1, 0) with global phase pi/2 and unit fidelity."""
        result = self._convert(1.0, 0.0, qubit_grid, rb87_atoms, desk_drive, math.pi / 2, with_beta_length)

        assert result.a_out == pytest.approx(1.0, abs=1e-9)
        assert abs(result.b_out) < 1e-9
        assert result.global_phase == pytest.approx(math.pi / 2, abs=1e-8)
        assert result.qubit_fidelity == pytest.approx(1.0, abs=1e-12)
        assert result.leakage < 1e-9

    def test_equal_superposition(self, qubit_grid, rb87_atoms, desk_drive, with_beta_length):
        """Should recover equal amplitudes."""
        amplitude = 1 / math.sqrt(2)
        result = self._convert(amplitude, amplitude, qubit_grid, rb87_atoms, desk_drive, math.pi / 2, with_beta_length)

        assert result.a_out == pytest.approx(result.b_out, abs=1e-6)
        assert result.qubit_fidelity >= 1 - 1e-6

    @pytest.mark.parametrize("beta_length", [0.3, 1.0, 2.5])
    def test_global_phase_independent_of_coupling(self, qubit_grid, rb87_atoms, desk_drive, with_beta_length, beta_length):
        """Should report the phase of i sin(beta L) for partial conversion."""
        result = self._convert(1.0, 0.0, qubit_grid, rb87_atoms, desk_drive, beta_length, with_beta_length)

        assert result.global_phase == pytest.approx(math.pi / 2, abs=1e-8)
        assert abs(result.a_out) ** 2 == pytest.approx(math.sin(beta_length) ** 2, abs=1e-9)

    def test_random_qubits(self, qubit_grid, rb87_atoms, desk_drive, with_beta_length):
        """Should transfer random normalized qubits with unit fidelity and stable ordering."""
        medium = with_beta_length(rb87_atoms, desk_drive, math.pi / 2)
        grid = make_propagation_grid(derive_params(medium, desk_drive))
        rng = np.random.default_rng(20240611)

        for _ in range(100):
            raw = rng.normal(size=4)
            a, b = complex(raw[0], raw[1]), complex(raw[2], raw[3])
            norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
            a, b = a / norm, b / norm
            qubit = time_bin_qubit(a, b, 0.0, 10e-9, 50e-9, qubit_grid)

            result = convert_time_bin_qubit(qubit, "analytic", medium, desk_drive, grid)

            assert result.qubit_fidelity >= 1 - 1e-6
            if abs(abs(a) - abs(b)) > 1e-3:
                assert (abs(a) > abs(b)) == (abs(result.a_out) > abs(result.b_out))
            assert cmath.isclose(result.a_out, a, abs_tol=1e-6)
            assert cmath.isclose(result.b_out, b, abs_tol=1e-6)

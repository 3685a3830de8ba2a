"""
Integration tests for the Maxwell-Bloch tier.

Tests the full tier against the lossless tiers in the adiabatic regime, the
EIT limit of a single decoupled carrier, qubit transfer, and the tier
comparison outside the regime.
"""

import math

import numpy as np
import pytest

from slowlight.analysis import convert_time_bin_qubit, quantum_efficiency
from slowlight.models import DriveConfig, TimeGrid
from slowlight.physics import coherence_params, derive_params
from slowlight.propagation import (
    analytic_history,
    compare_tiers,
    make_propagation_grid,
    propagate_bloch,
    propagate_full,
)
from slowlight.signals import centroid, gaussian_pulse, photon_number, time_bin_qubit

GAMMA = 2 * math.pi * 3e6


def _sampled_qubits(count, seed):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        vector = rng.normal(size=2) + 1j * rng.normal(size=2)
        vector /= np.linalg.norm(vector)
        pairs.append((complex(vector[0]), complex(vector[1])))
    return pairs


SAMPLED_QUBITS = _sampled_qubits(5, seed=7)


@pytest.mark.integration
@pytest.mark.slow
class TestAdiabaticRegime:
    """Test the full tier where all regime conditions hold."""

    def test_efficiency_close_to_analytic(self, desk_atoms, desk_drive, desk_grid):
        """Should convert nearly completely at beta*L = pi/2 and keep the pulse shape."""
        params = derive_params(desk_atoms, desk_drive)
        grid = make_propagation_grid(params, n_z=128)
        pulse = gaussian_pulse(0.0, 3e-9, desk_grid)

        full = quantum_efficiency(propagate_full(pulse, None, desk_atoms, desk_drive, grid))
        analytic = quantum_efficiency(analytic_history(pulse, None, params, grid))

        assert abs(full.eta - analytic.eta) <= 0.05
        assert full.shape_fidelity >= 0.99
        assert full.eta + full.residual_n1 <= 1 + 1e-6

    def test_decoupled_carrier_shows_eit(self, rb87_atoms):
        """Should attenuate by exp(-kappa1 L) and delay by L / v1 without the second carrier."""
        atoms = rb87_atoms.model_copy(update={"length": 2e-3})
        drive = DriveConfig(omega_c=50 * GAMMA, omega_0=300 * GAMMA, delta=300 * GAMMA)
        params = derive_params(atoms, drive)
        bundle = coherence_params(atoms, drive).replace(g2=0.0)
        grid = TimeGrid(t_start=-210e-9, t_end=210e-9, n_samples=32768)
        pulse = gaussian_pulse(0.0, 40e-9, grid)
        v_ref = 2 * params.v1

        history = propagate_bloch(pulse, None, bundle, atoms.length, 64, v_ref)
        output = history.envelope(1)

        assert math.sqrt(photon_number(output)) == pytest.approx(math.exp(-params.kappa1 * atoms.length), rel=0.02)
        assert centroid(output) + atoms.length / v_ref == pytest.approx(atoms.length / params.v1, rel=0.02)
        assert np.all(history.e2 == 0)

    def test_qubit_transfer(self, desk_atoms, desk_drive):
        """Should carry a superposition qubit to carrier 2 with high fidelity."""
        params = derive_params(desk_atoms, desk_drive)
        grid = TimeGrid(t_start=-16e-9, t_end=16e-9, n_samples=4096)
        amplitude = 1 / math.sqrt(2)
        qubit = time_bin_qubit(amplitude, 1j * amplitude, -5e-9, 2e-9, 10e-9, grid)

        result = convert_time_bin_qubit(
            qubit, "full", desk_atoms, desk_drive, make_propagation_grid(params, n_z=64)
        )

        assert result.qubit_fidelity >= 0.99
        assert abs(result.a_out) == pytest.approx(abs(result.b_out), rel=0.05)

    @pytest.mark.parametrize("a, b", SAMPLED_QUBITS)
    def test_sampled_qubits(self, desk_atoms, desk_drive, a, b):
        """Should keep the fidelity at or above 0.99 for random superpositions."""
        params = derive_params(desk_atoms, desk_drive)
        grid = TimeGrid(t_start=-16e-9, t_end=16e-9, n_samples=4096)
        qubit = time_bin_qubit(a, b, -5e-9, 2e-9, 10e-9, grid)

        result = convert_time_bin_qubit(
            qubit, "full", desk_atoms, desk_drive, make_propagation_grid(params, n_z=64)
        )

        assert result.qubit_fidelity >= 0.99


@pytest.mark.integration
@pytest.mark.slow
class TestOutsideRegime:
    """Test the tier comparison when the pulse is too short."""

    def test_short_pulse_flagged(self, desk_atoms, desk_drive):
        """Should flag the comparison and show the full tier distorting the pulse."""
        params = derive_params(desk_atoms, desk_drive)
        grid = TimeGrid(t_start=-4.5e-9, t_end=4.5e-9, n_samples=1024)
        pulse = gaussian_pulse(0.0, 0.3e-9, grid)

        comparison = compare_tiers(pulse, desk_atoms, desk_drive, make_propagation_grid(params, n_z=128))

        assert comparison.flagged
        assert comparison.regime_ok is False
        assert comparison.shape_fidelity["full"] < comparison.shape_fidelity["reduced"]
        assert set(comparison.eta_differences) == {"analytic-reduced", "analytic-full", "reduced-full"}

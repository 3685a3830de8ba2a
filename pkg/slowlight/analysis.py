"""
Analysis

Physical results extracted from a propagation run: intensities, photon
numbers, quantum efficiency, and the transfer of time-bin qubits between
the two carriers.
"""

import cmath
import math
from typing import Optional

import numpy as np
import pandas as pd

from slowlight.error_utils import AnalysisError
from slowlight.logging_config import get_logger
from slowlight.models import (
    AtomicSystem,
    ConversionResult,
    DriveConfig,
    PropagationGrid,
    QubitTransferResult,
    RegimeThresholds,
)
from slowlight.propagation import FieldHistory, propagate, split_input
from slowlight.signals import (
    MIN_PHOTON_NUMBER,
    PulseEnvelope,
    TimeBinQubit,
    centroid,
    overlap_fidelity,
    photon_number,
    shift_envelope,
)

logger = get_logger(__name__)

INPUT_NORMALIZATION_TOLERANCE = 1e-6


def intensity(history: FieldHistory, carrier: int, z: float, t: float) -> float:
    """
    |E_i(z, tau)|^2 at a grid point.

    Raises:
        GridError: If (z, t) is not on the grid
    """
    row = history.z_index(z)
    column = history.tau_index(t)
    samples = history.e1 if carrier == 1 else history.e2
    return float(abs(samples[row, column]) ** 2)


def _other(carrier: int) -> int:
    return 2 if carrier == 1 else 1


def _input_photons(history: FieldHistory, input_carrier: int = 1) -> float:
    n_in = float(history.photon_numbers(input_carrier)[0])
    if n_in < MIN_PHOTON_NUMBER:
        raise AnalysisError(f"carrier-{input_carrier} input carries {n_in:.3e} photons; efficiency undefined")
    if abs(n_in - 1.0) > INPUT_NORMALIZATION_TOLERANCE:
        logger.warning(
            f"Carrier-{input_carrier} input photon number is {n_in:.9g}, not 1; efficiencies are relative"
        )
    return n_in


def _frame_delay(source: PulseEnvelope, output: PulseEnvelope) -> float:
    """Centroid shift of the output against the input in the retarded frame."""
    if photon_number(output) < MIN_PHOTON_NUMBER:
        return 0.0
    return centroid(output) - centroid(source)


def quantum_efficiency(history: FieldHistory, input_carrier: int = 1) -> ConversionResult:
    """
    Conversion figures of a single photon entering on input_carrier.

    eta = n_out(L) / n_in(0), where out is the other carrier. The shape
    fidelity compares the converted output with the input shifted by the
    measured centroid delay; it is 0 when no photon is converted. The
    reported delay is the lab-frame group delay, centroid shift plus L / v_ref.

    Raises:
        AnalysisError: If n_in(0) is below 1e-12
    """
    output_carrier = _other(input_carrier)
    n_in0 = _input_photons(history, input_carrier)
    n_in = history.photon_numbers(input_carrier)
    n_out = history.photon_numbers(output_carrier)

    source = history.envelope(input_carrier, 0)
    output = history.envelope(output_carrier, -1)
    shift = _frame_delay(source, output)
    if n_out[-1] < MIN_PHOTON_NUMBER:
        fidelity = 0.0
    else:
        fidelity = overlap_fidelity(output, shift_envelope(source, shift))

    return ConversionResult(
        eta=float(n_out[-1] / n_in0),
        residual_n1=float(n_in[-1] / n_in0),
        conservation_residual=float(abs(n_in[-1] + n_out[-1] - n_in[0] - n_out[0])),
        shape_fidelity=fidelity,
        delay=shift + history.length / history.v_ref,
    )


def efficiency_profile(history: FieldHistory, input_carrier: int = 1) -> pd.DataFrame:
    """
    Photon numbers and efficiency along the medium.

    Columns z_m, beta_z (NaN when the run has no beta), n1, n2, eta.
    """
    n_in0 = _input_photons(history, input_carrier)
    n1 = history.photon_numbers(1)
    n2 = history.photon_numbers(2)
    converted = n2 if input_carrier == 1 else n1
    beta_z = history.z * history.beta if history.beta is not None else np.full(len(history.z), np.nan)
    return pd.DataFrame({
        "z_m": history.z,
        "beta_z": beta_z,
        "n1": n1,
        "n2": n2,
        "eta": converted / n_in0,
    })


def complete_conversion_residual(history: FieldHistory, input_carrier: int = 1) -> float:
    """Residual input-carrier amplitude factor sqrt(n_in(L) / n_in(0)); |cos(beta L)| when lossless."""
    return math.sqrt(max(quantum_efficiency(history, input_carrier).residual_n1, 0.0))


def decompose_output(qubit: TimeBinQubit, history: FieldHistory) -> QubitTransferResult:
    """
    Recover the converted qubit amplitudes from a propagated two-bin input.

    The qubit enters on the carrier of its bin profile. The output on the
    other carrier is projected onto the input bins shifted by the measured
    centroid delay. The common phase, arg(a* a_raw + b* b_raw), is removed.

    Raises:
        AnalysisError: If no photon is captured in the output bins
    """
    input_carrier = qubit.bin_profile.carrier
    source = history.envelope(input_carrier, 0)
    output = history.envelope(_other(input_carrier), -1)
    delay = _frame_delay(source, output)
    a_raw, b_raw = qubit.decompose(output, delay)

    captured = abs(a_raw) ** 2 + abs(b_raw) ** 2
    if captured < MIN_PHOTON_NUMBER:
        raise AnalysisError("qubit fidelity undefined: no photon captured in the output bins")

    overlap = qubit.a.conjugate() * a_raw + qubit.b.conjugate() * b_raw
    phase = cmath.phase(overlap) if abs(overlap) > 0 else 0.0
    rotation = cmath.exp(-1j * phase)
    a_out = a_raw * rotation
    b_out = b_raw * rotation

    n2 = photon_number(output)
    leakage = max(n2 - qubit.captured_photons(a_raw, b_raw, delay), 0.0)
    fidelity = min(abs(overlap) ** 2 / captured, 1.0)

    logger.info(f"Qubit transfer: a_out={a_out:.6f}, b_out={b_out:.6f}, fidelity={fidelity:.9f}")
    return QubitTransferResult(
        a_out=a_out,
        b_out=b_out,
        global_phase=phase,
        qubit_fidelity=fidelity,
        leakage=leakage,
        n2=n2,
    )


def convert_time_bin_qubit(
    qubit: TimeBinQubit,
    tier: str,
    atoms: AtomicSystem,
    drive: DriveConfig,
    grid: PropagationGrid,
    convention_prefactor: float = 1.0,
    thresholds: Optional[RegimeThresholds] = None
) -> QubitTransferResult:
    """
    Propagate a time-bin qubit and read out the converted qubit.

    Args:
        qubit: Input qubit, bins already validated for separation; it enters
            on the carrier of its bin profile
        tier: analytic, reduced or full
        atoms: Medium
        drive: Drive fields
        grid: Propagation grid

    Returns:
        QubitTransferResult with the phase-corrected output amplitudes
    """
    in1, in2 = split_input(qubit.envelope())
    history = propagate(
        tier, in1, in2, atoms, drive, grid, convention_prefactor, thresholds, pulse_width=qubit.width,
    )
    return decompose_output(qubit, history)

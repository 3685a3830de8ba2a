"""
Propagation

Evolves the two quantum-field envelopes through the medium at three tiers:

- full: Maxwell-Bloch z-march with the coherences integrated along tau at
  every slice (midpoint predictor-corrector in z, RK4 in tau)
- reduced: lossless coupled-wave model with group velocities v1, v2 and
  parametric coupling beta (Strang split-step, spectral transport)
- analytic: closed-form cos/sin mode mixing for equal velocities

All tiers work in the retarded frame tau = t - z / v_ref.
"""

import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.constants import c as SPEED_OF_LIGHT

from slowlight.coherence import (
    CoherenceParams,
    bare_from_dressed,
    check_step_size,
    integrate_coherences,
)
from slowlight.error_utils import GridError, NumericalError
from slowlight.logging_config import get_logger
from slowlight.models import (
    TIERS,
    AtomicSystem,
    DerivedParams,
    DriveConfig,
    PropagationGrid,
    RegimeThresholds,
    TierComparison,
    TimeGrid,
)
from slowlight.physics import (
    MAX_PHASE_PER_SLICE,
    check_regime,
    coherence_params,
    default_propagation_steps,
    derive_params,
)
from slowlight.signals import PulseEnvelope, fwhm_estimate, photon_number, vacuum

logger = get_logger(__name__)

DEFAULT_TIER_TOLERANCE = 0.05
# samples below this fraction of the peak intensity count as empty
OCCUPIED_INTENSITY_FRACTION = 1e-8


@dataclass(frozen=True, eq=False)
class FieldHistory:
    """Envelopes e1(z, tau), e2(z, tau); row k is slice z[k]."""

    z: np.ndarray
    grid: TimeGrid
    e1: np.ndarray
    e2: np.ndarray
    v_ref: float
    tier: str
    beta: Optional[float] = None

    def __post_init__(self):
        expected = (len(self.z), self.grid.n_samples)
        if self.e1.shape != expected or self.e2.shape != expected:
            raise GridError(f"field arrays must have shape {expected}")

    @property
    def length(self) -> float:
        return float(self.z[-1])

    @property
    def n_z(self) -> int:
        return len(self.z) - 1

    def envelope(self, carrier: int, index: int = -1) -> PulseEnvelope:
        samples = self.e1[index] if carrier == 1 else self.e2[index]
        return PulseEnvelope(self.grid, samples, carrier)

    def photon_numbers(self, carrier: int) -> np.ndarray:
        samples = self.e1 if carrier == 1 else self.e2
        return np.sum(np.abs(samples) ** 2, axis=1) * self.grid.dt

    def z_index(self, z: float) -> int:
        return _grid_index(self.z, z, "z")

    def tau_index(self, tau: float) -> int:
        return _grid_index(self.grid.times, tau, "tau")


def _grid_index(axis: np.ndarray, value: float, name: str) -> int:
    index = int(np.argmin(np.abs(axis - value)))
    spacing = abs(axis[1] - axis[0]) if len(axis) > 1 else 1.0
    if abs(axis[index] - value) > 1e-6 * spacing:
        raise GridError(f"{name} = {value:.9g} is not on the grid")
    return index


def _check_inputs(in1: PulseEnvelope, in2: Optional[PulseEnvelope]) -> PulseEnvelope:
    if in2 is None:
        return vacuum(in1.grid, carrier=2)
    if in1.grid != in2.grid:
        raise GridError("input envelopes must share one time grid")
    return in2


def split_input(source: PulseEnvelope) -> Tuple[PulseEnvelope, PulseEnvelope]:
    """(in1, in2) for a single photon entering on source.carrier; the other carrier is vacuum."""
    if source.carrier == 1:
        return source, vacuum(source.grid, carrier=2)
    return vacuum(source.grid, carrier=1), source


def _input_width(in1: PulseEnvelope, in2: PulseEnvelope) -> float:
    return fwhm_estimate(in1 if photon_number(in1) > 0 else in2)


def walk_off_shifts(params: DerivedParams, v_ref: float) -> Tuple[float, float]:
    """Retarded-frame displacement L (1/v_i - 1/v_ref) of each carrier over the medium (s)."""
    return (
        params.length * (1.0 / params.v1 - 1.0 / v_ref),
        params.length * (1.0 / params.v2 - 1.0 / v_ref),
    )


def check_walk_off(
    in1: PulseEnvelope,
    in2: PulseEnvelope,
    params: DerivedParams,
    grid: PropagationGrid
) -> None:
    """
    Check that group walk-off keeps the occupied part of the inputs inside the window.

    Transport is periodic in tau, so a field pushed past one edge of the
    window would re-enter at the other.

    Raises:
        GridError: If the walked-off field would leave the time window
    """
    intensity = np.abs(in1.samples) ** 2 + np.abs(in2.samples) ** 2
    peak = float(np.max(intensity))
    if peak == 0:
        return
    occupied = np.flatnonzero(intensity >= OCCUPIED_INTENSITY_FRACTION * peak)
    times = in1.grid.times
    shifts = walk_off_shifts(params, grid.v_ref)
    earliest = times[occupied[0]] + min(0.0, *shifts)
    latest = times[occupied[-1]] + max(0.0, *shifts)
    if earliest < in1.grid.t_start or latest > in1.grid.t_end:
        raise GridError(
            f"group walk-off of {shifts[0]:.4g} s (carrier 1) and {shifts[1]:.4g} s (carrier 2) "
            f"carries the field over [{earliest:.6g}, {latest:.6g}] s, outside the time window "
            f"[{in1.grid.t_start:.6g}, {in1.grid.t_end:.6g}] s; widen the grid"
        )


def make_propagation_grid(
    params: DerivedParams,
    n_z: Optional[int] = None,
    v_ref: Optional[float] = None
) -> PropagationGrid:
    """
    Propagation grid for a medium, with n_z and v_ref defaulted.

    The default frame velocity is the harmonic mean 2 v1 v2 / (v1 + v2).
    """
    if n_z is None:
        n_z = default_propagation_steps(params)
    if v_ref is None:
        v_ref = 2.0 * params.v1 * params.v2 / (params.v1 + params.v2)
    return PropagationGrid(n_z=n_z, length=params.length, v_ref=v_ref)


def validate_propagation_grid(grid: PropagationGrid, params: DerivedParams) -> None:
    """
    Raises:
        GridError: If dz * beta or dz * kappa_i exceeds 0.05, or the grid
            length differs from the medium length
    """
    if not math.isclose(grid.length, params.length, rel_tol=1e-12):
        raise GridError(f"grid length {grid.length:.6g} m differs from medium length {params.length:.6g} m")
    limit = MAX_PHASE_PER_SLICE * (1 + 1e-9)
    for name, rate in (("beta", params.beta), ("kappa1", params.kappa1), ("kappa2", params.kappa2)):
        if grid.dz * rate > limit:
            raise GridError(
                f"dz*{name} = {grid.dz * rate:.4g} exceeds {MAX_PHASE_PER_SLICE}; "
                f"need n_z >= {default_propagation_steps(params)}"
            )


def analytic_solution(
    in1: PulseEnvelope,
    in2: Optional[PulseEnvelope],
    beta: float,
    z: float
) -> Tuple[PulseEnvelope, PulseEnvelope]:
    """E_i(z) = E_i(0) cos(beta z) + i E_j(0) sin(beta z), equal velocities."""
    in2 = _check_inputs(in1, in2)
    c, s = math.cos(beta * z), math.sin(beta * z)
    out1 = c * in1.samples + 1j * s * in2.samples
    out2 = c * in2.samples + 1j * s * in1.samples
    return PulseEnvelope(in1.grid, out1, 1), PulseEnvelope(in1.grid, out2, 2)


def analytic_history(
    in1: PulseEnvelope,
    in2: Optional[PulseEnvelope],
    params: DerivedParams,
    grid: PropagationGrid
) -> FieldHistory:
    """Closed-form mixing evaluated on every slice of the propagation grid."""
    in2 = _check_inputs(in1, in2)
    z = grid.z
    c = np.cos(params.beta * z)[:, None]
    s = np.sin(params.beta * z)[:, None]
    e1 = c * in1.samples[None, :] + 1j * s * in2.samples[None, :]
    e2 = c * in2.samples[None, :] + 1j * s * in1.samples[None, :]
    e1[0] = in1.samples
    e2[0] = in2.samples
    return FieldHistory(z=z, grid=in1.grid, e1=e1, e2=e2, v_ref=grid.v_ref, tier="analytic", beta=params.beta)


def propagate_reduced(
    in1: PulseEnvelope,
    in2: Optional[PulseEnvelope],
    params: DerivedParams,
    grid: PropagationGrid
) -> FieldHistory:
    """
    Lossless coupled-wave propagation with walk-off.

    Each field is transported at its own group velocity relative to the
    frame; each z-step is half transport, exact 2x2 rotation by beta*dz,
    half transport. Transport is exact in the spectral domain, so the whole
    march runs on spectra and is unitary.

    Raises:
        GridError: If the grid violates dz * beta <= 0.05 or dz * kappa_i <= 0.05,
            or walk-off would carry the field outside the time window
    """
    in2 = _check_inputs(in1, in2)
    validate_propagation_grid(grid, params)
    check_walk_off(in1, in2, params, grid)
    started = time.perf_counter()

    dz = grid.dz
    frequencies = np.fft.fftfreq(in1.grid.n_samples, in1.grid.dt)
    walk1 = 1.0 / params.v1 - 1.0 / grid.v_ref
    walk2 = 1.0 / params.v2 - 1.0 / grid.v_ref
    half1 = np.exp(-2j * np.pi * frequencies * walk1 * dz / 2)
    half2 = np.exp(-2j * np.pi * frequencies * walk2 * dz / 2)
    c, s = math.cos(params.beta * dz), math.sin(params.beta * dz)

    e1 = np.empty((grid.n_z + 1, in1.grid.n_samples), dtype=complex)
    e2 = np.empty_like(e1)
    e1[0] = in1.samples
    e2[0] = in2.samples
    spectrum1 = np.fft.fft(in1.samples)
    spectrum2 = np.fft.fft(in2.samples)

    for k in range(grid.n_z):
        spectrum1 = spectrum1 * half1
        spectrum2 = spectrum2 * half2
        spectrum1, spectrum2 = c * spectrum1 + 1j * s * spectrum2, 1j * s * spectrum1 + c * spectrum2
        spectrum1 = spectrum1 * half1
        spectrum2 = spectrum2 * half2
        e1[k + 1] = np.fft.ifft(spectrum1)
        e2[k + 1] = np.fft.ifft(spectrum2)

    logger.info(f"Reduced propagation: {grid.n_z} slices in {time.perf_counter() - started:.3f}s")
    return FieldHistory(z=grid.z, grid=in1.grid, e1=e1, e2=e2, v_ref=grid.v_ref, tier="reduced", beta=params.beta)


def _medium_response(
    e1: np.ndarray,
    e2: np.ndarray,
    params: CoherenceParams,
    dt: float
) -> Tuple[np.ndarray, np.ndarray]:
    state = integrate_coherences(e1, e2, dt, params)
    sigma_01, sigma_32 = bare_from_dressed(state)
    scale = 1j * params.atoms_per_length
    return scale * params.g1 * sigma_01, scale * params.g2 * sigma_32


def propagate_bloch(
    in1: PulseEnvelope,
    in2: Optional[PulseEnvelope],
    params: CoherenceParams,
    length: float,
    n_z: int,
    v_ref: float
) -> FieldHistory:
    """
    Maxwell-Bloch z-march for given coherence parameters.

    dE/dz = (1/v_ref - 1/c) dE/dtau + i g (N/L) sigma, with sigma_01 and
    sigma_32 from the dressed coherences integrated along tau at every slice.
    Phase factors are cancelled under perfect phase matching.

    Raises:
        StepSizeError: If the tau grid is too coarse for RK4
        NumericalError: If a field becomes non-finite (carries the slice index)
    """
    in2 = _check_inputs(in1, in2)
    if n_z < 1:
        raise GridError(f"n_z must be positive, got {n_z}")
    dt = in1.grid.dt
    check_step_size(dt, params)
    started = time.perf_counter()

    dz = length / n_z
    drift = 1.0 / v_ref - 1.0 / SPEED_OF_LIGHT
    frequencies = np.fft.fftfreq(in1.grid.n_samples, dt)
    advance = np.exp(2j * np.pi * frequencies * drift * dz)

    history1 = np.empty((n_z + 1, in1.grid.n_samples), dtype=complex)
    history2 = np.empty_like(history1)
    history1[0] = in1.samples
    history2[0] = in2.samples
    e1 = np.array(in1.samples)
    e2 = np.array(in2.samples)

    for k in range(n_z):
        f1, f2 = _medium_response(e1, e2, params, dt)
        mid1 = e1 + 0.5 * dz * f1
        mid2 = e2 + 0.5 * dz * f2
        f1, f2 = _medium_response(mid1, mid2, params, dt)
        e1 = np.fft.ifft(np.fft.fft(e1 + dz * f1) * advance)
        e2 = np.fft.ifft(np.fft.fft(e2 + dz * f2) * advance)

        if not (np.all(np.isfinite(e1)) and np.all(np.isfinite(e2))):
            logger.error(f"Non-finite field at z-slice {k + 1} of {n_z}")
            raise NumericalError("field became non-finite", slice_index=k + 1)
        history1[k + 1] = e1
        history2[k + 1] = e2

    logger.info(
        f"Maxwell-Bloch propagation: {n_z} slices x {in1.grid.n_samples} samples "
        f"in {time.perf_counter() - started:.2f}s"
    )
    z = np.linspace(0.0, length, n_z + 1)
    return FieldHistory(z=z, grid=in1.grid, e1=history1, e2=history2, v_ref=v_ref, tier="full")


def propagate_full(
    in1: PulseEnvelope,
    in2: Optional[PulseEnvelope],
    atoms: AtomicSystem,
    drive: DriveConfig,
    grid: PropagationGrid,
    convention_prefactor: float = 1.0,
    thresholds: Optional[RegimeThresholds] = None,
    pulse_width: Optional[float] = None
) -> FieldHistory:
    """
    Full Maxwell-Bloch propagation of both quantum fields.

    Runs the regime check first; failing conditions are logged, not fatal.
    pulse_width is the T used there, estimated from the inputs when unset.

    Raises:
        GridError: If the propagation grid violates its invariants
        StepSizeError: If the tau grid is too coarse for RK4
        NumericalError: If a field becomes non-finite
    """
    params = derive_params(atoms, drive, convention_prefactor)
    in2 = _check_inputs(in1, in2)
    validate_propagation_grid(grid, params)
    check_walk_off(in1, in2, params, grid)
    check_regime(params, pulse_width or _input_width(in1, in2), atoms, thresholds)
    bundle = coherence_params(atoms, drive, convention_prefactor)
    history = propagate_bloch(in1, in2, bundle, grid.length, grid.n_z, grid.v_ref)
    return FieldHistory(
        z=history.z, grid=history.grid, e1=history.e1, e2=history.e2,
        v_ref=history.v_ref, tier="full", beta=params.beta,
    )


def propagate(
    tier: str,
    in1: PulseEnvelope,
    in2: Optional[PulseEnvelope],
    atoms: AtomicSystem,
    drive: DriveConfig,
    grid: PropagationGrid,
    convention_prefactor: float = 1.0,
    thresholds: Optional[RegimeThresholds] = None,
    pulse_width: Optional[float] = None
) -> FieldHistory:
    """Run one tier on a medium and drive."""
    if tier not in TIERS:
        raise ValueError(f"unknown tier '{tier}', expected one of {TIERS}")
    if tier == "full":
        return propagate_full(in1, in2, atoms, drive, grid, convention_prefactor, thresholds, pulse_width)
    params = derive_params(atoms, drive, convention_prefactor)
    if tier == "reduced":
        return propagate_reduced(in1, in2, params, grid)
    return analytic_history(in1, in2, params, grid)


def compare_tiers(
    source: PulseEnvelope,
    atoms: AtomicSystem,
    drive: DriveConfig,
    grid: PropagationGrid,
    convention_prefactor: float = 1.0,
    thresholds: Optional[RegimeThresholds] = None,
    tolerance: float = DEFAULT_TIER_TOLERANCE,
    pulse_width: Optional[float] = None
) -> TierComparison:
    """
    Run all three tiers on one input photon and report efficiency and shape per tier.

    The photon enters on source.carrier. The comparison is flagged when the
    regime check fails or any pairwise efficiency difference exceeds the
    tolerance. pulse_width defaults to the FWHM estimate of the source.
    """
    from slowlight.analysis import quantum_efficiency

    params = derive_params(atoms, drive, convention_prefactor)
    width = pulse_width or fwhm_estimate(source)
    report = check_regime(params, width, atoms, thresholds)
    in1, in2 = split_input(source)

    eta = {}
    fidelity = {}
    for tier in TIERS:
        history = propagate(tier, in1, in2, atoms, drive, grid, convention_prefactor, thresholds, width)
        result = quantum_efficiency(history, source.carrier)
        eta[tier] = result.eta
        fidelity[tier] = result.shape_fidelity

    differences = {
        f"{first}-{second}": abs(eta[first] - eta[second])
        for i, first in enumerate(TIERS)
        for second in TIERS[i + 1:]
    }
    flagged = not report.all_ok or max(differences.values()) > tolerance
    if flagged:
        logger.warning(f"Tier comparison flagged: eta={eta}, regime_ok={report.all_ok}")
    return TierComparison(
        eta=eta,
        shape_fidelity=fidelity,
        eta_differences=differences,
        regime_ok=report.all_ok,
        tolerance=tolerance,
        flagged=flagged,
    )


def export_history_csv(history: FieldHistory, path: Union[str, Path], decimate: int = 1) -> None:
    """
    Write (z_m, tau_s, re_e1, im_e1, re_e2, im_e2) rows, z-major.

    decimate keeps every k-th slice and sample; the last slice is always kept.
    """
    if decimate < 1:
        raise ValueError(f"decimate must be >= 1, got {decimate}")
    z_rows = list(range(0, len(history.z), decimate))
    if z_rows[-1] != len(history.z) - 1:
        z_rows.append(len(history.z) - 1)
    taus = history.grid.times[::decimate]

    e1 = history.e1[z_rows][:, ::decimate]
    e2 = history.e2[z_rows][:, ::decimate]
    frame = pd.DataFrame({
        "z_m": np.repeat(history.z[z_rows], len(taus)),
        "tau_s": np.tile(taus, len(z_rows)),
        "re_e1": e1.real.ravel(),
        "im_e1": e1.imag.ravel(),
        "re_e2": e2.real.ravel(),
        "im_e2": e2.imag.ravel(),
    })
    frame.to_csv(path, index=False)

"""
Scenario runner

Turns a ScenarioConfig into inputs and grids, runs a tier and collects the
results. Shared by the command line and the sweep workers.
"""

import math
import time
from dataclasses import dataclass
from typing import Optional, Tuple

from scipy.fft import next_fast_len

from slowlight.analysis import decompose_output, quantum_efficiency
from slowlight.error_utils import ConfigError
from slowlight.logging_config import get_logger
from slowlight.models import (
    ConversionResult,
    DerivedParams,
    PropagationGrid,
    QubitTransferResult,
    RegimeReport,
    ScenarioConfig,
    TierComparison,
    TimeGrid,
)
from slowlight.physics import check_regime, coherence_params, derive_params
from slowlight.propagation import (
    FieldHistory,
    compare_tiers,
    make_propagation_grid,
    propagate,
    split_input,
    walk_off_shifts,
)
from slowlight.signals import (
    SAMPLES_PER_WIDTH,
    PulseEnvelope,
    TimeBinQubit,
    default_grid,
    fwhm_estimate,
    gaussian_pulse,
    load_envelope_csv,
    time_bin_qubit,
)

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ScenarioRun:
    """One propagated scenario with its derived quantities and results."""

    config: ScenarioConfig
    tier: str
    params: DerivedParams
    regime: RegimeReport
    history: FieldHistory
    result: ConversionResult
    elapsed: float

    @property
    def input_carrier(self) -> int:
        return self.config.pulse.carrier


@dataclass(frozen=True, eq=False)
class QubitRun:
    config: ScenarioConfig
    tier: str
    params: DerivedParams
    regime: RegimeReport
    qubit: TimeBinQubit
    history: FieldHistory
    result: QubitTransferResult
    elapsed: float


def _max_rate(config: ScenarioConfig, tier: str) -> Optional[float]:
    if tier != "full":
        return None
    return coherence_params(config.atoms, config.drive, config.convention_prefactor).max_rate


def walk_off_margins(config: ScenarioConfig, tier: Optional[str] = None) -> Tuple[float, float]:
    """
    Extra window (before, after) the pulse needs for group walk-off (s).

    Zero for the analytic tier, which has no walk-off.
    """
    tier = tier or config.tier
    if tier == "analytic":
        return 0.0, 0.0
    params = derive_params(config.atoms, config.drive, config.convention_prefactor)
    shifts = walk_off_shifts(params, build_propagation_grid(config, params).v_ref)
    return max(0.0, -min(shifts)), max(0.0, max(shifts))


def build_time_grid(config: ScenarioConfig, tier: Optional[str] = None) -> TimeGrid:
    """
    Time grid from the overrides, or sized from the pulse.

    The default window spans 6 T around the pulse (and the late bin of a
    qubit), widened by the group walk-off of the reduced and full tiers.
    Unset sample counts follow dt <= T/40 and, for the full tier,
    dt * max(Omega_0, Omega, Gamma_1+, Gamma_2+) <= 0.09.
    """
    tier = tier or config.tier
    width = config.pulse.width
    max_rate = _max_rate(config, tier)
    extra = config.qubit.tau if config.qubit is not None else 0.0

    if config.grid.t_start is None:
        before, after = walk_off_margins(config, tier)
        grid = default_grid(config.pulse.center, width, extra=extra + after, max_rate=max_rate, lead=before)
        if before or after:
            logger.debug(f"Time window widened by {before:.4g} s before and {after:.4g} s after for walk-off")
        if config.grid.n_samples is not None:
            grid = TimeGrid(t_start=grid.t_start, t_end=grid.t_end, n_samples=config.grid.n_samples)
        return grid

    n_samples = config.grid.n_samples
    if n_samples is None:
        dt_max = width / SAMPLES_PER_WIDTH
        if max_rate is not None:
            dt_max = min(dt_max, 0.09 / max_rate)
        n_samples = next_fast_len(math.ceil((config.grid.t_end - config.grid.t_start) / dt_max) + 1)
    return TimeGrid(t_start=config.grid.t_start, t_end=config.grid.t_end, n_samples=n_samples)


def build_input(config: ScenarioConfig, grid: Optional[TimeGrid] = None) -> PulseEnvelope:
    """Input photon on the configured carrier; a tabulated envelope brings its own grid."""
    carrier = config.pulse.carrier
    if config.pulse.shape == "file":
        return load_envelope_csv(config.pulse.envelope_file, carrier=carrier)
    grid = grid or build_time_grid(config)
    return gaussian_pulse(config.pulse.center, config.pulse.width, grid, carrier=carrier)


def build_qubit(config: ScenarioConfig, grid: Optional[TimeGrid] = None) -> TimeBinQubit:
    """
    Raises:
        ConfigError: Without a qubit section, or with a tabulated pulse shape
    """
    if config.qubit is None:
        raise ConfigError("qubit mode needs the qubit section", key="qubit.tau_s")
    if config.pulse.shape == "file":
        raise ConfigError("qubit mode builds Gaussian time bins; use pulse.shape = gaussian", key="pulse.shape")
    grid = grid or build_time_grid(config)
    q = config.qubit
    return time_bin_qubit(q.a, q.b, config.pulse.center, config.pulse.width, q.tau, grid, config.pulse.carrier)


def build_propagation_grid(config: ScenarioConfig, params: DerivedParams) -> PropagationGrid:
    return make_propagation_grid(params, n_z=config.grid.n_z, v_ref=config.grid.v_ref)


def pulse_width(config: ScenarioConfig, source: Optional[PulseEnvelope] = None) -> float:
    """Configured T, or the FWHM estimate of a tabulated envelope."""
    if config.pulse.shape != "file":
        return config.pulse.width
    return fwhm_estimate(source if source is not None else build_input(config))


def run_scenario(config: ScenarioConfig, tier: Optional[str] = None) -> ScenarioRun:
    """
    Propagate the configured photon through the medium.

    Raises:
        ParameterError: If derived quantities are undefined
        GridError: If a grid violates its invariants
        NumericalError: If the full tier diverges
    """
    tier = tier or config.tier
    started = time.perf_counter()
    params = derive_params(config.atoms, config.drive, config.convention_prefactor)
    source = build_input(config, build_time_grid(config, tier) if config.pulse.shape != "file" else None)
    width = pulse_width(config, source)
    regime = check_regime(params, width, config.atoms, config.thresholds, config.drive)
    grid = build_propagation_grid(config, params)
    in1, in2 = split_input(source)

    logger.info(
        f"Running {tier} tier: carrier {source.carrier} input, beta*L={params.beta_length:.6g}, "
        f"n_z={grid.n_z}, samples={source.grid.n_samples}"
    )
    history = propagate(
        tier, in1, in2, config.atoms, config.drive, grid,
        config.convention_prefactor, config.thresholds, width,
    )
    result = quantum_efficiency(history, source.carrier)
    elapsed = time.perf_counter() - started
    logger.info(f"Finished {tier} tier in {elapsed:.2f}s: eta={result.eta:.6f}")
    return ScenarioRun(config, tier, params, regime, history, result, elapsed)


def run_qubit(config: ScenarioConfig, tier: Optional[str] = None) -> QubitRun:
    """Propagate the configured time-bin qubit and read out the converted qubit."""
    tier = tier or config.tier
    started = time.perf_counter()
    params = derive_params(config.atoms, config.drive, config.convention_prefactor)
    qubit = build_qubit(config, build_time_grid(config, tier))
    regime = check_regime(params, config.pulse.width, config.atoms, config.thresholds, config.drive)
    grid = build_propagation_grid(config, params)
    in1, in2 = split_input(qubit.envelope())

    history = propagate(
        tier, in1, in2, config.atoms, config.drive, grid,
        config.convention_prefactor, config.thresholds, config.pulse.width,
    )
    result = decompose_output(qubit, history)
    elapsed = time.perf_counter() - started
    logger.info(f"Finished qubit transfer ({tier}) in {elapsed:.2f}s: fidelity={result.qubit_fidelity:.9f}")
    return QubitRun(config, tier, params, regime, qubit, history, result, elapsed)


def run_comparison(config: ScenarioConfig) -> TierComparison:
    """All three tiers on the configured photon, on the full-tier time grid."""
    params = derive_params(config.atoms, config.drive, config.convention_prefactor)
    source = build_input(config, build_time_grid(config, "full") if config.pulse.shape != "file" else None)
    grid = build_propagation_grid(config, params)
    return compare_tiers(
        source, config.atoms, config.drive, grid,
        config.convention_prefactor, config.thresholds,
        pulse_width=pulse_width(config, source),
    )

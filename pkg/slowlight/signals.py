"""
Signals

Single-photon envelopes sampled on uniform time grids. Samples carry units of
s^-1/2 so that the photon number is sum |f_k|^2 dt.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.fft import next_fast_len
from scipy.special import erfc

from slowlight.error_utils import AnalysisError, ConfigError, GridError
from slowlight.logging_config import get_logger
from slowlight.models import TimeGrid

logger = get_logger(__name__)

# intensity FWHM over intensity standard deviation
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
SAMPLES_PER_WIDTH = 40
COVERAGE_WIDTHS = 5.0
MIN_PHOTON_NUMBER = 1e-12
BIN_OVERLAP_MAX = 1e-6


@dataclass(frozen=True, eq=False)
class PulseEnvelope:
    """Complex single-photon amplitude on a time grid for carrier 1 or 2."""

    grid: TimeGrid
    samples: np.ndarray
    carrier: int = 1

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != (self.grid.n_samples,):
            raise GridError(
                f"envelope has shape {samples.shape}, grid expects ({self.grid.n_samples},)"
            )
        if self.carrier not in (1, 2):
            raise ValueError(f"carrier must be 1 or 2, got {self.carrier}")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def with_samples(self, samples: np.ndarray, carrier: Optional[int] = None) -> "PulseEnvelope":
        return PulseEnvelope(self.grid, samples, self.carrier if carrier is None else carrier)

    def scaled(self, factor: complex) -> "PulseEnvelope":
        return self.with_samples(factor * self.samples)


def vacuum(grid: TimeGrid, carrier: int = 2) -> PulseEnvelope:
    return PulseEnvelope(grid, np.zeros(grid.n_samples, dtype=complex), carrier)


def gaussian_sigma(width_T: float) -> float:
    """Intensity standard deviation of a Gaussian with intensity FWHM T."""
    return width_T / FWHM_PER_SIGMA


def truncation_loss(center: float, width_T: float, grid: TimeGrid) -> float:
    """Fraction of a Gaussian photon falling outside the grid window."""
    s = gaussian_sigma(width_T)
    root2s = math.sqrt(2.0) * s
    return 0.5 * float(erfc((center - grid.t_start) / root2s) + erfc((grid.t_end - center) / root2s))


def gaussian_pulse(center: float, width_T: float, grid: TimeGrid, carrier: int = 1) -> PulseEnvelope:
    """
    Normalized Gaussian photon with intensity FWHM width_T.

    Amplitude exp(-(t - center)^2 / (4 s^2)) with s = T / (2 sqrt(2 ln 2)),
    scaled so the sampled photon number is exactly 1.

    Raises:
        GridError: If the grid does not cover center +/- 5 T
    """
    if not width_T > 0:
        raise GridError(f"pulse width must be positive, got {width_T}")
    margin = COVERAGE_WIDTHS * width_T
    tolerance = 1e-9 * width_T
    if grid.t_start > center - margin + tolerance or grid.t_end < center + margin - tolerance:
        loss = truncation_loss(center, width_T, grid)
        raise GridError(
            f"grid [{grid.t_start:.6g}, {grid.t_end:.6g}] s does not cover center +/- 5T "
            f"= [{center - margin:.6g}, {center + margin:.6g}] s; truncation loss {loss:.3e}"
        )
    s = gaussian_sigma(width_T)
    t = grid.times
    samples = np.exp(-((t - center) ** 2) / (4.0 * s ** 2)).astype(complex)
    samples /= math.sqrt(np.sum(np.abs(samples) ** 2) * grid.dt)
    return PulseEnvelope(grid, samples, carrier)


def photon_number(p: PulseEnvelope) -> float:
    return float(np.sum(np.abs(p.samples) ** 2) * p.grid.dt)


def _same_grid(p: PulseEnvelope, q: PulseEnvelope) -> None:
    if p.grid != q.grid:
        raise GridError("envelopes are sampled on different grids")


def inner_product(p: PulseEnvelope, q: PulseEnvelope) -> complex:
    """sum conj(p_k) q_k dt."""
    _same_grid(p, q)
    return complex(np.vdot(p.samples, q.samples) * p.grid.dt)


def overlap_fidelity(p: PulseEnvelope, q: PulseEnvelope) -> float:
    """
    Normalized squared overlap |<p|q>|^2 / (n_p n_q).

    Raises:
        AnalysisError: If either envelope carries less than 1e-12 photons
    """
    n_p = photon_number(p)
    n_q = photon_number(q)
    if n_p < MIN_PHOTON_NUMBER or n_q < MIN_PHOTON_NUMBER:
        raise AnalysisError(
            f"overlap fidelity undefined for photon numbers {n_p:.3e} and {n_q:.3e}"
        )
    value = abs(inner_product(p, q)) ** 2 / (n_p * n_q)
    return float(min(value, 1.0))


def translate(samples: np.ndarray, dt: float, delay: float) -> np.ndarray:
    """
    Spectral time translation x(t) -> x(t - delay) along the last axis.

    The window is treated as periodic; content must vanish at its edges.
    """
    n = samples.shape[-1]
    frequencies = np.fft.fftfreq(n, dt)
    phase = np.exp(-2j * np.pi * frequencies * delay)
    return np.fft.ifft(np.fft.fft(samples, axis=-1) * phase, axis=-1)


def shift_envelope(p: PulseEnvelope, delay: float) -> PulseEnvelope:
    return p.with_samples(translate(p.samples, p.grid.dt, delay))


def centroid(p: PulseEnvelope) -> float:
    """First moment of |f|^2 (s)."""
    weights = np.abs(p.samples) ** 2
    total = np.sum(weights)
    if total <= 0:
        raise AnalysisError("centroid undefined for an empty envelope")
    return float(np.sum(p.times * weights) / total)


def rms_width(p: PulseEnvelope) -> float:
    """Standard deviation of |f|^2 (s)."""
    weights = np.abs(p.samples) ** 2
    total = np.sum(weights)
    if total <= 0:
        raise AnalysisError("width undefined for an empty envelope")
    mean = np.sum(p.times * weights) / total
    return float(math.sqrt(np.sum((p.times - mean) ** 2 * weights) / total))


def fwhm_estimate(p: PulseEnvelope) -> float:
    """Intensity FWHM of the Gaussian with the same rms width."""
    return FWHM_PER_SIGMA * rms_width(p)


def default_grid(
    center: float,
    width_T: float,
    span_widths: float = 6.0,
    extra: float = 0.0,
    max_rate: Optional[float] = None,
    max_step_phase: float = 0.09,
    lead: float = 0.0
) -> TimeGrid:
    """
    Grid covering [center - lead - span_widths*T, center + extra + span_widths*T].

    Spacing satisfies dt <= T/40 and, when max_rate is given,
    dt * max_rate <= max_step_phase. The sample count is rounded up to an
    FFT-friendly length.
    """
    t_start = center - lead - span_widths * width_T
    t_end = center + extra + span_widths * width_T
    dt_max = width_T / SAMPLES_PER_WIDTH
    if max_rate is not None and max_rate > 0:
        dt_max = min(dt_max, max_step_phase / max_rate)
    n_samples = next_fast_len(math.ceil((t_end - t_start) / dt_max) + 1)
    return TimeGrid(t_start=t_start, t_end=t_end, n_samples=n_samples)


@dataclass(frozen=True, eq=False)
class TimeBinQubit:
    """
    Photon in two time bins: a * f(t) + b * f(t - tau).

    bin_profile is the normalized early-bin envelope of width T.
    """

    a: complex
    b: complex
    bin_profile: PulseEnvelope
    tau: float
    width: float
    late_bin: PulseEnvelope = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise AnalysisError(f"|a|^2 + |b|^2 = {norm:.12g}, must equal 1 within 1e-9")
        if self.tau < COVERAGE_WIDTHS * self.width:
            raise AnalysisError(
                f"bin separation {self.tau:.6g} s is below 5T = {COVERAGE_WIDTHS * self.width:.6g} s"
            )
        grid = self.bin_profile.grid
        late_edge = centroid(self.bin_profile) + self.tau + COVERAGE_WIDTHS * self.width
        if late_edge > grid.t_end + 1e-9 * self.width:
            raise GridError(
                f"late time bin reaches {late_edge:.6g} s beyond the grid end {grid.t_end:.6g} s"
            )
        late = shift_envelope(self.bin_profile, self.tau)
        overlap = abs(inner_product(self.bin_profile, late)) ** 2
        if overlap >= BIN_OVERLAP_MAX:
            raise AnalysisError(f"time bins overlap: cross overlap {overlap:.3e}")
        object.__setattr__(self, "late_bin", late)

    def bins(self, delay: float = 0.0) -> Tuple[PulseEnvelope, PulseEnvelope]:
        if delay == 0.0:
            return self.bin_profile, self.late_bin
        return shift_envelope(self.bin_profile, delay), shift_envelope(self.late_bin, delay)

    def envelope(self) -> PulseEnvelope:
        return self.bin_profile.with_samples(
            self.a * self.bin_profile.samples + self.b * self.late_bin.samples
        )

    def decompose(self, envelope: PulseEnvelope, delay: float = 0.0) -> Tuple[complex, complex]:
        """Bin amplitudes of an envelope, from the Gram system of the (delayed) bins."""
        early, late = self.bins(delay)
        gram = np.array([
            [inner_product(early, early), inner_product(early, late)],
            [inner_product(late, early), inner_product(late, late)],
        ])
        projections = np.array([inner_product(early, envelope), inner_product(late, envelope)])
        a, b = np.linalg.solve(gram, projections)
        return complex(a), complex(b)

    def captured_photons(self, a: complex, b: complex, delay: float = 0.0) -> float:
        """Photon number of a * early + b * late."""
        early, late = self.bins(delay)
        combined = a * early.samples + b * late.samples
        return float(np.sum(np.abs(combined) ** 2) * early.grid.dt)


def time_bin_qubit(
    a: complex,
    b: complex,
    center: float,
    width_T: float,
    tau: float,
    grid: TimeGrid,
    carrier: int = 1
) -> TimeBinQubit:
    """Time-bin qubit with Gaussian bins at center and center + tau."""
    profile = gaussian_pulse(center, width_T, grid, carrier)
    return TimeBinQubit(a=complex(a), b=complex(b), bin_profile=profile, tau=tau, width=width_T)


def load_envelope_csv(path: Union[str, Path], carrier: int = 1) -> PulseEnvelope:
    """
    Read a tabulated envelope with columns (t_s, re, im).

    Raises:
        ConfigError: If the file is malformed or the time axis is not uniform
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot parse envelope file {path}: {e}") from e
    if frame.shape[1] != 3 or frame.shape[0] < 2:
        raise ConfigError(f"envelope file {path} needs 3 columns (t_s, re, im) and at least 2 rows")

    values = frame.to_numpy(dtype=float)
    t = values[:, 0]
    steps = np.diff(t)
    dt = (t[-1] - t[0]) / (len(t) - 1)
    if dt <= 0 or not np.allclose(steps, dt, rtol=1e-6, atol=0):
        raise ConfigError(f"envelope file {path} is not sampled on a uniform increasing time axis")

    grid = TimeGrid(t_start=float(t[0]), t_end=float(t[-1]), n_samples=len(t))
    samples = values[:, 1] + 1j * values[:, 2]
    logger.info(f"Loaded envelope from {path}: {len(t)} samples, photon number {np.sum(np.abs(samples) ** 2) * dt:.6g}")
    return PulseEnvelope(grid, samples, carrier)


def save_envelope_csv(p: PulseEnvelope, path: Union[str, Path]) -> None:
    frame = pd.DataFrame({
        "t_s": p.times,
        "re": p.samples.real,
        "im": p.samples.imag,
    })
    frame.to_csv(path, index=False)

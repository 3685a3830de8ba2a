"""
Pydantic Models

Validated value types for atoms, drives, grids, results and scenario configuration.
"""

from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.constants import c as SPEED_OF_LIGHT

# 87Rb atomic mass in unified atomic mass units
RB87_MASS_U = 86.909180527

TIERS = ("analytic", "reduced", "full")

_STRICT = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


# ==============================================================================
# Physical model
# ==============================================================================

class AtomicSystem(BaseModel):
    """Level structure, decay rates, wavelengths and medium geometry"""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        allow_inf_nan=False,
        json_schema_extra={
            "example": {
                "gamma1": 3.7699e7, "gamma2": 3.7699e7, "gamma3": 3.6128e7,
                "lambda1": 780e-9, "lambda2": 1.47e-6, "coupling_ratio": 0.96,
                "density": 1e19, "length": 1.6e-3
            }
        },
    )

    gamma1: float = Field(..., gt=0, description="Decay rate of state |1> (rad/s)")
    gamma2: float = Field(..., gt=0, description="Decay rate of state |2> (rad/s)")
    gamma3: float = Field(..., gt=0, description="Decay rate of state |3> (rad/s)")
    lambda1: float = Field(..., gt=0, description="Carrier wavelength of quantum field 1 (m)")
    lambda2: float = Field(..., gt=0, description="Carrier wavelength of quantum field 2 (m)")
    coupling_ratio: float = Field(..., gt=0, description="Dimensionless g2/g1")
    density: float = Field(..., gt=0, description="Atomic number density (m^-3)")
    length: float = Field(..., gt=0, description="Medium length L (m)")
    mass_u: float = Field(RB87_MASS_U, gt=0, description="Atomic mass (u), used for the Doppler bound")


class DriveConfig(BaseModel):
    """Classical drive fields: Rabi frequencies and detunings (all rad/s)"""

    model_config = _STRICT

    omega_c: float = Field(..., description="Rabi frequency of the 1<->2 coupling field")
    omega_0: float = Field(..., ge=0, description="Rabi frequency of the 0<->3 dressing field")
    delta: float = Field(..., description="One-photon detuning")
    delta_0: float = Field(0.0, description="Detuning of the 0<->3 field")
    lambda_c: Optional[float] = Field(None, gt=0, description="Wavelength of the 1<->2 coupling field (m)")
    lambda_0: Optional[float] = Field(None, gt=0, description="Wavelength of the 0<->3 dressing field (m)")

    @field_validator('omega_c')
    @classmethod
    def omega_c_positive(cls, v):
        if v <= 0:
            raise ValueError(
                "must be > 0: absorption, group velocity and parametric coupling "
                "are undefined for a vanishing coupling field"
            )
        return v

    @model_validator(mode='after')
    def dressing_defined(self):
        if self.omega_0 == 0 and self.delta_0 == 0:
            raise ValueError("omega_0 = 0 together with delta_0 = 0 leaves the dressing angle undefined")
        return self

    @model_validator(mode='after')
    def wavelengths_paired(self):
        if (self.lambda_c is None) != (self.lambda_0 is None):
            raise ValueError("lambda_c and lambda_0 must be given together")
        return self

    @property
    def has_wavelengths(self) -> bool:
        return self.lambda_c is not None and self.lambda_0 is not None

    @property
    def is_resonant(self) -> bool:
        """Resonant-conversion configuration: delta == omega_0 and delta_0 == 0."""
        return self.delta == self.omega_0 and self.delta_0 == 0


class DerivedParams(BaseModel):
    """Quantities derived from an AtomicSystem and a DriveConfig"""

    model_config = _STRICT

    sigma1: float = Field(..., description="Resonant cross-section at lambda1 (m^2)")
    sigma2: float = Field(..., description="Resonant cross-section at lambda2 (m^2)")
    alpha: float = Field(..., description="Optical depth N*sigma1*L")
    kappa1: float = Field(..., ge=0, description="Field absorption coefficient, carrier 1 (1/m)")
    kappa2: float = Field(..., ge=0, description="Field absorption coefficient, carrier 2 (1/m)")
    v1: float = Field(..., description="Group velocity, carrier 1 (m/s)")
    v2: float = Field(..., description="Group velocity, carrier 2 (m/s)")
    beta: float = Field(..., ge=0, description="Parametric coupling (rad/m)")
    eit_window: float = Field(..., description="EIT window width (rad/s)")
    theta: float = Field(..., description="Dressing mixing angle (rad)")
    gamma1p: float = Field(..., gt=0, description="Gamma_1+ = Gamma_1 + Gamma_3/2 (rad/s)")
    gamma2p: float = Field(..., gt=0, description="Gamma_2+ = Gamma_2 + Gamma_3/2 (rad/s)")
    d_squared: float = Field(..., description="D^2 = Omega^2 + Gamma_1+ Gamma_2+ (rad^2/s^2)")
    omega_c: float = Field(..., gt=0, description="Coupling Rabi frequency (rad/s)")
    coupling1: float = Field(..., ge=0, description="G1 = g1^2 N / c (rad/(s m))")
    coupling2: float = Field(..., ge=0, description="G2 = g2^2 N / c (rad/(s m))")
    gamma_eff: float = Field(..., gt=0, description="sqrt(Gamma_1+ Gamma_2+) (rad/s)")
    length: float = Field(..., gt=0, description="Medium length (m)")

    @model_validator(mode='after')
    def velocities_subluminal(self):
        for name in ("v1", "v2"):
            v = getattr(self, name)
            if not 0 < v < SPEED_OF_LIGHT:
                raise ValueError(f"{name} = {v:.6g} m/s is outside (0, c); the slow-light model does not apply")
        return self

    @property
    def beta_length(self) -> float:
        return self.beta * self.length

    @property
    def kappa_length(self) -> Tuple[float, float]:
        return self.kappa1 * self.length, self.kappa2 * self.length


class RegimeThresholds(BaseModel):
    """Numeric thresholds for the validity conditions"""

    model_config = _STRICT

    absorption_max: float = Field(0.1, gt=0, description="kappa_i L must stay below this")
    eit_min: float = Field(1.0, gt=0, description="EIT window times pulse width must reach this")
    broadening_max: float = Field(1.0, gt=0, description="16 L / (v_i T^2 Omega) must stay at or below this")
    phase_mismatch_max: float = Field(0.1, gt=0, description="|dk L| warning level (rad)")


class ConditionCheck(BaseModel):
    """One validity condition evaluated on a configuration"""

    model_config = ConfigDict(frozen=True)

    name: str
    values: Tuple[float, ...]
    threshold: float
    relation: Literal["<", "<=", ">="]
    passed: bool


class RegimeReport(BaseModel):
    """Outcome of the validity conditions plus the Doppler temperature bound"""

    model_config = ConfigDict(frozen=True)

    absorption: ConditionCheck
    eit_window: ConditionCheck
    broadening: ConditionCheck
    doppler_temperature: float = Field(..., description="Maximum vapor temperature T_at (K)")
    all_ok: bool
    phase_mismatch: Optional[ConditionCheck] = Field(
        None, description="|dk L| against its warning level, when the drive wavelengths are known; not part of all_ok"
    )

    @model_validator(mode='after')
    def conjunction(self):
        expected = self.absorption.passed and self.eit_window.passed and self.broadening.passed
        if self.all_ok != expected:
            raise ValueError("all_ok must equal the conjunction of the individual flags")
        return self

    @property
    def absorption_ok(self) -> bool:
        return self.absorption.passed

    @property
    def eit_ok(self) -> bool:
        return self.eit_window.passed

    @property
    def broadening_ok(self) -> bool:
        return self.broadening.passed

    @property
    def conditions(self) -> List[ConditionCheck]:
        return [self.absorption, self.eit_window, self.broadening]


# ==============================================================================
# Grids
# ==============================================================================

class TimeGrid(BaseModel):
    """Uniform sampling of the (retarded) time axis"""

    model_config = _STRICT

    t_start: float = Field(..., description="First sample time (s)")
    t_end: float = Field(..., description="Last sample time (s)")
    n_samples: int = Field(..., ge=2, description="Number of samples")

    @model_validator(mode='after')
    def ordered(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must be greater than t_start")
        return self

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.n_samples - 1)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_samples)


class PropagationGrid(BaseModel):
    """z-discretization of the medium and the co-moving frame velocity"""

    model_config = _STRICT

    n_z: int = Field(..., ge=8, description="Number of z-slices")
    length: float = Field(..., gt=0, description="Medium length (m)")
    v_ref: float = Field(..., gt=0, description="Frame velocity, tau = t - z/v_ref (m/s)")

    @property
    def dz(self) -> float:
        return self.length / self.n_z

    @property
    def z(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_z + 1)


# ==============================================================================
# Results
# ==============================================================================

class ConversionResult(BaseModel):
    """Efficiency and shape figures of merit of one propagation run"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    eta: float = Field(..., description="Quantum efficiency n2(L)/n1(0)")
    residual_n1: float = Field(..., description="Photon number left at carrier 1, relative to n1(0)")
    conservation_residual: float = Field(..., description="|n1(L) + n2(L) - n1(0) - n2(0)|")
    shape_fidelity: float = Field(..., ge=0, le=1 + 1e-9, description="Overlap of the output with the input shape")
    delay: float = Field(..., description="Group delay from the intensity centroid shift (s)")


class QubitTransferResult(BaseModel):
    """Time-bin qubit amplitudes recovered on the converted carrier"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a_out: complex
    b_out: complex
    global_phase: float = Field(..., description="Common phase removed from the output amplitudes (rad)")
    qubit_fidelity: float = Field(..., ge=0, le=1 + 1e-9)
    leakage: float = Field(..., description="Carrier-2 photon number outside the two output bins")
    n2: float = Field(..., description="Photon number on the converted carrier at z = L")


class TierComparison(BaseModel):
    """Per-tier efficiency and fidelity with pairwise differences"""

    model_config = ConfigDict(frozen=True)

    eta: Dict[str, float]
    shape_fidelity: Dict[str, float]
    eta_differences: Dict[str, float]
    regime_ok: bool
    tolerance: float = 0.05
    flagged: bool

    @property
    def max_difference(self) -> float:
        return max(self.eta_differences.values()) if self.eta_differences else 0.0


# ==============================================================================
# Scenario configuration
# ==============================================================================

class PulseConfig(BaseModel):
    """Input pulse and the carrier it enters on"""

    model_config = _STRICT

    width: float = Field(20e-9, gt=0, description="Intensity FWHM T (s)")
    center: float = Field(0.0, description="Pulse center (s)")
    carrier: Literal[1, 2] = Field(1, description="Input carrier; the photon is converted to the other one")
    shape: Literal["gaussian", "file"] = Field("gaussian", description="Envelope source")
    envelope_file: Optional[str] = Field(None, description="Tabulated envelope CSV (t_s, re, im)")

    @model_validator(mode='after')
    def file_given(self):
        if self.shape == "file" and not self.envelope_file:
            raise ValueError("shape = file requires pulse.envelope_file")
        return self


class QubitConfig(BaseModel):
    """Time-bin qubit amplitudes and bin separation"""

    model_config = _STRICT

    a_re: float = 1.0
    a_im: float = 0.0
    b_re: float = 0.0
    b_im: float = 0.0
    tau: float = Field(..., gt=0, description="Bin separation (s)")

    @model_validator(mode='after')
    def normalized(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"|a|^2 + |b|^2 = {norm:.12g}, must equal 1 within 1e-9")
        return self

    @property
    def a(self) -> complex:
        return complex(self.a_re, self.a_im)

    @property
    def b(self) -> complex:
        return complex(self.b_re, self.b_im)


class GridConfig(BaseModel):
    """Optional grid overrides; unset values follow the sizing rules"""

    model_config = _STRICT

    t_start: Optional[float] = None
    t_end: Optional[float] = None
    n_samples: Optional[int] = Field(None, ge=2)
    n_z: Optional[int] = Field(None, ge=8)
    v_ref: Optional[float] = Field(None, gt=0)

    @model_validator(mode='after')
    def window_complete(self):
        if (self.t_start is None) != (self.t_end is None):
            raise ValueError("t_start and t_end must be given together")
        if self.t_start is not None and not self.t_end > self.t_start:
            raise ValueError("t_end must be greater than t_start")
        return self


class ScenarioConfig(BaseModel):
    """Everything needed to run one scenario"""

    model_config = _STRICT

    atoms: AtomicSystem
    drive: DriveConfig
    pulse: PulseConfig = Field(default_factory=PulseConfig)
    qubit: Optional[QubitConfig] = None
    grid: GridConfig = Field(default_factory=GridConfig)
    tier: Literal["analytic", "reduced", "full"] = "analytic"
    thresholds: RegimeThresholds = Field(default_factory=RegimeThresholds)
    convention_prefactor: float = Field(1.0, gt=0, description="Scale of g_i^2 N / c relative to Gamma_i N sigma_i / 2")

    @model_validator(mode='after')
    def bins_separated(self):
        if self.qubit is not None and self.qubit.tau < 5 * self.pulse.width:
            raise ValueError(
                f"qubit.tau = {self.qubit.tau:.6g} s must be at least 5 pulse widths "
                f"({5 * self.pulse.width:.6g} s) so the time bins do not overlap"
            )
        return self


class SweepSpec(BaseModel):
    """A one-dimensional parameter sweep"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    parameter: str = Field(..., description="Dotted config key, or beta_l")
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    count: Optional[int] = Field(None, ge=1)
    spacing: Literal["linear", "log"] = "linear"
    output: Optional[str] = None

    @model_validator(mode='after')
    def one_source(self):
        has_range = self.start is not None and self.stop is not None and self.count is not None
        if self.values is None and not has_range:
            raise ValueError("give either values or start, stop and count")
        if self.values is not None and has_range:
            raise ValueError("give values or a range, not both")
        if self.values is not None and len(self.values) == 0:
            raise ValueError("values must not be empty")
        if has_range and self.spacing == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log spacing needs positive start and stop")
        return self

    def points(self) -> List[float]:
        if self.values is not None:
            return list(self.values)
        if self.count == 1:
            return [self.start]
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count).tolist()
        return np.linspace(self.start, self.stop, self.count).tolist()


def gamma_unit(atoms_gamma2: float) -> float:
    """Reference rate for _in_gamma values: the transverse rate gamma2 / 2."""
    return atoms_gamma2 / 2.0

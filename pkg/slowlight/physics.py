"""
Physical Model

Derived quantities of the four-level medium (cross-sections, absorption,
group velocities, parametric coupling, EIT window, dressing angle) and the
validity conditions of the slow-light conversion regime.

Coupling convention: G_i = g_i^2 N / c with G_1 = p * Gamma_1 * N * sigma_1 / 2,
where Gamma_i = gamma_i / 2 are transverse rates and p is the configurable
convention prefactor. G_2 = (g2/g1)^2 * G_1.
"""

import math
from typing import Optional

from scipy.constants import k as BOLTZMANN
from scipy.constants import physical_constants

from slowlight.coherence import CoherenceParams
from slowlight.error_utils import ParameterError
from slowlight.logging_config import get_logger
from slowlight.models import (
    AtomicSystem,
    ConditionCheck,
    DerivedParams,
    DriveConfig,
    RegimeReport,
    RegimeThresholds,
)

logger = get_logger(__name__)

ATOMIC_MASS_UNIT = physical_constants["atomic mass constant"][0]

# dz * rate bound for the z-march
MAX_PHASE_PER_SLICE = 0.05
MIN_SLICES = 8


def cross_section(wavelength: float) -> float:
    """Resonant absorption cross-section 3 lambda^2 / (4 pi)."""
    return 3.0 * wavelength ** 2 / (4.0 * math.pi)


def wavevector(wavelength: float) -> float:
    return 2.0 * math.pi / wavelength


def dressing_angle(omega_0: float, delta_0: float) -> float:
    """Mixing angle with tan(2 theta) = 2 omega_0 / delta_0; pi/4 on resonance."""
    return 0.5 * math.atan2(2.0 * omega_0, delta_0)


def _check_drive(drive: DriveConfig) -> None:
    if not drive.omega_c > 0:
        raise ParameterError(
            "must be > 0: absorption, group velocity and parametric coupling are undefined",
            key="drive.omega_c",
        )
    if drive.omega_0 == 0 and drive.delta_0 == 0:
        raise ParameterError(
            "omega_0 = 0 together with delta_0 = 0 leaves the dressing angle undefined",
            key="drive.omega_0",
        )


def _transverse_rates(atoms: AtomicSystem):
    gamma1 = atoms.gamma1 / 2.0
    gamma2 = atoms.gamma2 / 2.0
    gamma3 = atoms.gamma3 / 2.0
    return gamma1, gamma2, gamma3, gamma1 + gamma3 / 2.0, gamma2 + gamma3 / 2.0


def _couplings(atoms: AtomicSystem, convention_prefactor: float):
    gamma1 = atoms.gamma1 / 2.0
    coupling1 = convention_prefactor * gamma1 * atoms.density * cross_section(atoms.lambda1) / 2.0
    coupling2 = atoms.coupling_ratio ** 2 * coupling1
    return coupling1, coupling2


def derive_params(
    atoms: AtomicSystem,
    drive: DriveConfig,
    convention_prefactor: float = 1.0
) -> DerivedParams:
    """
    Compute the derived quantities of a medium under a given drive.

    Args:
        atoms: Level structure and medium geometry
        drive: Classical drive fields
        convention_prefactor: Scale applied to g_i^2 N / c

    Returns:
        DerivedParams

    Raises:
        ParameterError: If omega_c <= 0, the dressing angle is undefined, or
            the resulting group velocity is not below c
    """
    _check_drive(drive)
    if not convention_prefactor > 0:
        raise ParameterError("must be > 0", key="convention_prefactor")

    sigma1 = cross_section(atoms.lambda1)
    sigma2 = cross_section(atoms.lambda2)
    _, _, _, gamma1p, gamma2p = _transverse_rates(atoms)
    coupling1, coupling2 = _couplings(atoms, convention_prefactor)

    omega = drive.omega_c
    kappa1 = coupling1 * gamma1p / (4.0 * omega ** 2)
    kappa2 = coupling2 * gamma2p / (4.0 * omega ** 2)
    v1 = 4.0 * omega ** 2 / coupling1
    v2 = 4.0 * omega ** 2 / coupling2
    beta = math.sqrt(coupling1 * coupling2) / (4.0 * omega)
    gamma_eff = math.sqrt(gamma1p * gamma2p)
    alpha = atoms.density * sigma1 * atoms.length
    eit_window = omega ** 2 / (gamma_eff * math.sqrt(alpha))

    try:
        params = DerivedParams(
            sigma1=sigma1,
            sigma2=sigma2,
            alpha=alpha,
            kappa1=kappa1,
            kappa2=kappa2,
            v1=v1,
            v2=v2,
            beta=beta,
            eit_window=eit_window,
            theta=dressing_angle(drive.omega_0, drive.delta_0),
            gamma1p=gamma1p,
            gamma2p=gamma2p,
            d_squared=omega ** 2 + gamma1p * gamma2p,
            omega_c=omega,
            coupling1=coupling1,
            coupling2=coupling2,
            gamma_eff=gamma_eff,
            length=atoms.length,
        )
    except ValueError as e:
        raise ParameterError(f"derived parameters invalid: {e}") from e

    logger.debug(
        f"Derived params: beta*L={params.beta_length:.6g}, kappa*L={params.kappa_length}, "
        f"v=({v1:.6g}, {v2:.6g}) m/s, alpha={alpha:.6g}, eit_window={eit_window:.6g} rad/s"
    )
    return params


def coherence_params(
    atoms: AtomicSystem,
    drive: DriveConfig,
    convention_prefactor: float = 1.0
) -> CoherenceParams:
    """
    Build the rate and coupling bundle consumed by the coherence solver.

    Field envelopes are photon-flux amplitudes, so the atoms per unit length
    entering the field equations are taken over the cross-section sigma_1:
    g_i^2 * (atoms per length) = G_i.
    """
    _check_drive(drive)
    _, _, gamma3, gamma1p, gamma2p = _transverse_rates(atoms)
    coupling1, coupling2 = _couplings(atoms, convention_prefactor)
    atoms_per_length = atoms.density * cross_section(atoms.lambda1)
    return CoherenceParams(
        delta=drive.delta,
        omega_0=drive.omega_0,
        omega_c=drive.omega_c,
        gamma1p=gamma1p,
        gamma2p=gamma2p,
        gamma3=gamma3,
        g1=math.sqrt(coupling1 / atoms_per_length),
        g2=math.sqrt(coupling2 / atoms_per_length),
        atoms_per_length=atoms_per_length,
    )


def doppler_temperature(atoms: AtomicSystem) -> float:
    """
    Highest vapor temperature for which Doppler broadening stays negligible.

    Solves k u = Gamma_1 with u = sqrt(2 k_B T / m), the most probable speed,
    k = 2 pi / lambda_1 and Gamma_1 = gamma_1 / 2.
    """
    mass = atoms.mass_u * ATOMIC_MASS_UNIT
    speed = (atoms.gamma1 / 2.0) / wavevector(atoms.lambda1)
    return mass * speed ** 2 / (2.0 * BOLTZMANN)


def check_regime(
    params: DerivedParams,
    pulse_width: float,
    atoms: AtomicSystem,
    thresholds: Optional[RegimeThresholds] = None,
    drive: Optional[DriveConfig] = None
) -> RegimeReport:
    """
    Evaluate the validity conditions for efficient conversion.

    Args:
        params: Derived quantities
        pulse_width: Pulse width T (s)
        atoms: Medium, for its length and the Doppler bound
        thresholds: Overrides for the numeric thresholds
        drive: Drive fields; when they carry wavelengths the phase mismatch
            is checked too

    Returns:
        RegimeReport; failing conditions are flags, not errors. A phase
        mismatch only warns and does not enter all_ok

    Raises:
        ParameterError: If pulse_width is not positive
    """
    if not pulse_width > 0:
        raise ParameterError("must be > 0", key="pulse.width")
    thresholds = thresholds or RegimeThresholds()
    length = atoms.length

    absorption_values = (params.kappa1 * length, params.kappa2 * length)
    absorption = ConditionCheck(
        name="absorption",
        values=absorption_values,
        threshold=thresholds.absorption_max,
        relation="<",
        passed=all(v < thresholds.absorption_max for v in absorption_values),
    )

    eit_value = params.eit_window * pulse_width
    eit_window = ConditionCheck(
        name="eit_window",
        values=(eit_value,),
        threshold=thresholds.eit_min,
        relation=">=",
        passed=eit_value >= thresholds.eit_min,
    )

    broadening_values = tuple(
        16.0 * length / (v * pulse_width ** 2 * params.omega_c) for v in (params.v1, params.v2)
    )
    broadening = ConditionCheck(
        name="broadening",
        values=broadening_values,
        threshold=thresholds.broadening_max,
        relation="<=",
        passed=all(v <= thresholds.broadening_max for v in broadening_values),
    )

    report = RegimeReport(
        absorption=absorption,
        eit_window=eit_window,
        broadening=broadening,
        doppler_temperature=doppler_temperature(atoms),
        all_ok=absorption.passed and eit_window.passed and broadening.passed,
        phase_mismatch=phase_mismatch_check(atoms, drive, thresholds) if drive is not None else None,
    )

    for condition in report.conditions:
        if not condition.passed:
            logger.warning(
                f"Regime condition '{condition.name}' fails: values {condition.values} "
                f"vs threshold {condition.relation} {condition.threshold}"
            )
    return report


def dk_mismatch(k1: float, k: float, k2: float, k0: float) -> float:
    """Phase mismatch k1 + k - k2 - k0 (rad/m)."""
    return k1 + k - k2 - k0


def check_phase_matching(dk: float, length: float, threshold: float = 0.1) -> bool:
    """
    Check |dk L| against a threshold.

    Returns:
        True if phase matched within the threshold; logs a warning otherwise
    """
    mismatch = abs(dk * length)
    if mismatch > threshold:
        logger.warning(f"Phase mismatch |dk L| = {mismatch:.4g} rad exceeds {threshold:.4g} rad")
        return False
    return True


def phase_mismatch_check(
    atoms: AtomicSystem,
    drive: DriveConfig,
    thresholds: Optional[RegimeThresholds] = None
) -> Optional[ConditionCheck]:
    """
    |dk L| for collinear beams, or None when the drive wavelengths are unknown.

    dk = k1 + k - k2 - k0 from the carrier and drive wavelengths.
    """
    if not drive.has_wavelengths:
        return None
    thresholds = thresholds or RegimeThresholds()
    dk = dk_mismatch(
        wavevector(atoms.lambda1),
        wavevector(drive.lambda_c),
        wavevector(atoms.lambda2),
        wavevector(drive.lambda_0),
    )
    return ConditionCheck(
        name="phase_mismatch",
        values=(abs(dk * atoms.length),),
        threshold=thresholds.phase_mismatch_max,
        relation="<=",
        passed=check_phase_matching(dk, atoms.length, thresholds.phase_mismatch_max),
    )


def drive_wavelength_for_resonance(lambda1: float, lambda2: float, lambda0: float) -> float:
    """
    Wavelength of the 1<->2 drive that closes the four-photon loop
    omega_1 + omega = omega_2 + omega_0.
    """
    inverse = 1.0 / lambda2 + 1.0 / lambda0 - 1.0 / lambda1
    if inverse <= 0:
        raise ParameterError("no positive drive frequency closes the loop for these wavelengths")
    return 1.0 / inverse


def default_propagation_steps(params: DerivedParams) -> int:
    """Smallest n_z >= 8 with dz * beta <= 0.05 and dz * kappa_i <= 0.05."""
    fastest = max(params.beta, params.kappa1, params.kappa2)
    return max(MIN_SLICES, math.ceil(params.length * fastest / MAX_PHASE_PER_SLICE))

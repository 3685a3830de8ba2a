"""
Coherence Solver

Dressed-state coherences rho_-1, rho_-2, rho_+1, rho_+2 driven by the two
quantum-field envelopes. The dynamics are linear in the fields,

    d rho / dt = M rho + u1 * e1(t) + u2 * e2(t),

with state order [m1, m2, p1, p2] and frozen dressed populations of 1/2.
"""

import math
from dataclasses import dataclass, replace
from typing import Tuple, Union

import numpy as np
from scipy import linalg
from scipy.signal import lfilter

from slowlight.error_utils import NumericalError, StepSizeError
from slowlight.logging_config import get_logger

logger = get_logger(__name__)

ArrayLike = Union[complex, np.ndarray]

MAX_STEP_PHASE = 0.1
# eigenbasis conditioning beyond which the modal recurrence is abandoned
MAX_EIGENBASIS_CONDITION = 1e10

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CoherenceParams:
    """Rates (rad/s) and couplings (s^-1/2) for the coherence equations."""

    delta: float
    omega_0: float
    omega_c: float
    gamma1p: float
    gamma2p: float
    gamma3: float
    g1: float
    g2: float
    atoms_per_length: float
    sigma_mm: float = 0.5
    sigma_pp: float = 0.5

    @property
    def d_squared(self) -> float:
        return self.omega_c ** 2 + self.gamma1p * self.gamma2p

    @property
    def max_rate(self) -> float:
        return max(self.omega_0, self.omega_c, self.gamma1p, self.gamma2p)

    def replace(self, **changes) -> "CoherenceParams":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class CoherenceState:
    """Dressed coherences; scalars or arrays over a time grid."""

    rho_m1: ArrayLike
    rho_m2: ArrayLike
    rho_p1: ArrayLike
    rho_p2: ArrayLike
    sigma_mm: float = 0.5
    sigma_pp: float = 0.5

    def as_vector(self) -> np.ndarray:
        return np.array([self.rho_m1, self.rho_m2, self.rho_p1, self.rho_p2], dtype=complex)

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "CoherenceState":
        return cls(vector[0], vector[1], vector[2], vector[3])

    @classmethod
    def zero(cls) -> "CoherenceState":
        return cls(0j, 0j, 0j, 0j)


@dataclass(frozen=True)
class DressedTransform:
    """
    Bare <-> dressed basis change W = U(z) S(theta).

    S mixes |0> and |3> by theta; U(z) = diag(1, 1, 1, exp(i k0 z)). Columns of
    W are the dressed kets (|->, |1>, |2>, |+>) in the bare basis.
    """

    theta: float
    k0: float = 0.0
    z: float = 0.0

    @property
    def S(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([
            [c, 0, 0, -s],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [s, 0, 0, c],
        ], dtype=complex)

    @property
    def U(self) -> np.ndarray:
        return np.diag([1, 1, 1, np.exp(1j * self.k0 * self.z)]).astype(complex)

    @property
    def W(self) -> np.ndarray:
        return self.U @ self.S

    def is_unitary(self, tol: float = 1e-12) -> bool:
        identity = np.eye(4)
        return all(
            np.max(np.abs(m @ m.conj().T - identity)) <= tol for m in (self.S, self.U, self.W)
        )

    def bare_coherences(self, state: CoherenceState) -> Tuple[ArrayLike, ArrayLike]:
        """
        sigma_01 and sigma_32 from dressed coherences, for any theta and z.

        |0> = sum_j conj(W[0, j]) |j>, |3> = sum_j conj(W[3, j]) |j>, j in {-, +}.
        """
        w = self.W
        sigma_01 = np.conj(w[0, 0]) * state.rho_m1 + np.conj(w[0, 3]) * state.rho_p1
        sigma_32 = np.conj(w[3, 0]) * state.rho_m2 + np.conj(w[3, 3]) * state.rho_p2
        return sigma_01, sigma_32


def dressed_transform(theta: float, k0: float = 0.0, z: float = 0.0) -> DressedTransform:
    return DressedTransform(theta=theta, k0=k0, z=z)


def coherence_matrix(params: CoherenceParams) -> np.ndarray:
    """Homogeneous part M of the coherence equations, order [m1, m2, p1, p2]."""
    minus = -1j * (params.delta + params.omega_0)
    plus = -1j * (params.delta - params.omega_0)
    cross = -params.gamma3 / 2.0
    omega = 1j * params.omega_c
    return np.array([
        [minus - params.gamma1p, omega, cross, 0],
        [omega, minus - params.gamma2p, 0, cross],
        [cross, 0, plus - params.gamma1p, omega],
        [0, cross, omega, plus - params.gamma2p],
    ], dtype=complex)


def source_vectors(params: CoherenceParams) -> Tuple[np.ndarray, np.ndarray]:
    """Field drive vectors u1, u2; the p1 drive carries the opposite sign."""
    u1 = np.array([
        1j * params.g1 * params.sigma_mm / _SQRT2,
        0,
        -1j * params.g1 * params.sigma_pp / _SQRT2,
        0,
    ], dtype=complex)
    u2 = np.array([
        0,
        1j * params.g2 * params.sigma_mm / _SQRT2,
        0,
        1j * params.g2 * params.sigma_pp / _SQRT2,
    ], dtype=complex)
    return u1, u2


def coherence_rhs(
    state: CoherenceState,
    e1: ArrayLike,
    e2: ArrayLike,
    params: CoherenceParams
) -> CoherenceState:
    """Time derivative of the dressed coherences for given field amplitudes."""
    m = coherence_matrix(params)
    u1, u2 = source_vectors(params)
    x = state.as_vector()
    e1 = np.asarray(e1, dtype=complex)
    e2 = np.asarray(e2, dtype=complex)
    derivative = np.tensordot(m, x, axes=1) + np.multiply.outer(u1, e1) + np.multiply.outer(u2, e2)
    return CoherenceState.from_vector(derivative)


def steady_state_coherences(
    e1: ArrayLike,
    e2: ArrayLike,
    params: CoherenceParams,
    include_minus: bool = True
) -> CoherenceState:
    """
    Exact steady state of the coherence equations for constant fields.

    Args:
        e1, e2: Field amplitudes (scalars or arrays)
        params: Rates and couplings
        include_minus: If False, drop the rho_- branch and solve the rho_+
            block alone

    Raises:
        NumericalError: If the coefficient matrix is singular
    """
    m = coherence_matrix(params)
    u1, u2 = source_vectors(params)
    source = np.multiply.outer(u1, np.asarray(e1, dtype=complex)) + np.multiply.outer(u2, np.asarray(e2, dtype=complex))
    block = slice(0, 4) if include_minus else slice(2, 4)
    matrix = m[block, block]

    if np.linalg.cond(matrix) > 1.0 / np.finfo(float).eps:
        raise NumericalError("coherence matrix is singular: zero damping is unphysical")
    try:
        solution = linalg.solve(matrix, -source[block].reshape(matrix.shape[0], -1))
    except linalg.LinAlgError as e:
        raise NumericalError(f"coherence matrix is singular: {e}") from e
    solution = solution.reshape(source[block].shape)

    if include_minus:
        return CoherenceState.from_vector(solution)
    zero = np.zeros_like(solution[0])
    return CoherenceState(zero, zero, solution[0], solution[1])


def adiabatic_coherences(
    e1: ArrayLike,
    e2: ArrayLike,
    de1_dt: ArrayLike,
    de2_dt: ArrayLike,
    params: CoherenceParams,
    include_cross_derivative: bool = True
) -> Tuple[ArrayLike, ArrayLike]:
    """
    Adiabatic rho_+1, rho_+2 on the resonant configuration delta = omega_0.

    Static terms plus first derivative corrections. The last term of each
    expression couples to the partner field's derivative; the reduced
    coupled-wave model drops it (include_cross_derivative=False).
    """
    a = params.g1 * np.asarray(e1) / (2 * _SQRT2)
    b = params.g2 * np.asarray(e2) / (2 * _SQRT2)
    da = params.g1 * np.asarray(de1_dt) / (2 * _SQRT2)
    db = params.g2 * np.asarray(de2_dt) / (2 * _SQRT2)
    omega = params.omega_c
    g1p, g2p = params.gamma1p, params.gamma2p
    d2 = params.d_squared
    d4 = d2 ** 2

    rho_p1 = -1j * g2p * a / d2 - 1j * (omega ** 2 - g2p ** 2) * da / d4 - omega * b / d2
    rho_p2 = 1j * g1p * b / d2 + 1j * (omega ** 2 - g1p ** 2) * db / d4 + omega * a / d2
    if include_cross_derivative:
        rho_p1 = rho_p1 + (g1p + g2p) * omega * db / d4
        rho_p2 = rho_p2 - (g1p + g2p) * omega * da / d4
    return rho_p1, rho_p2


def bare_from_dressed(state: CoherenceState) -> Tuple[ArrayLike, ArrayLike]:
    """sigma_01 = (rho_-1 - rho_+1)/sqrt2, sigma_32 = (rho_-2 + rho_+2)/sqrt2."""
    sigma_01 = (state.rho_m1 - state.rho_p1) / _SQRT2
    sigma_32 = (state.rho_m2 + state.rho_p2) / _SQRT2
    return sigma_01, sigma_32


def time_derivative(samples: np.ndarray, dt: float) -> np.ndarray:
    """Centered differences inside the grid, one-sided at the edges."""
    return np.gradient(np.asarray(samples), dt)


def check_step_size(dt: float, params: CoherenceParams) -> None:
    """
    Reject time steps too coarse for RK4 on the fastest rate.

    Raises:
        StepSizeError: If dt * max(omega_0, omega_c, Gamma_1+, Gamma_2+) > 0.1
    """
    phase = dt * params.max_rate
    if phase > MAX_STEP_PHASE:
        raise StepSizeError(
            f"time step {dt:.4g} s gives dt*max_rate = {phase:.4g} > {MAX_STEP_PHASE}; "
            f"use at least {math.ceil(phase / MAX_STEP_PHASE)}x more samples"
        )


def integrate_coherences(
    e1: np.ndarray,
    e2: np.ndarray,
    dt: float,
    params: CoherenceParams,
    method: str = "modal"
) -> CoherenceState:
    """
    Classical RK4 integration of the coherence equations over a time grid.

    Coherences start at zero. The field value at each half step is the mean
    of its neighbours. method="modal" runs the same RK4 recurrence on the
    eigenmodes of M with scipy.signal.lfilter; method="loop" steps explicitly.

    Args:
        e1, e2: Field samples on a uniform grid
        dt: Grid spacing (s)
        params: Rates and couplings
        method: "modal" or "loop"

    Returns:
        CoherenceState holding arrays of the grid length

    Raises:
        StepSizeError: If dt violates the RK4 bound
    """
    check_step_size(dt, params)
    m = coherence_matrix(params)
    u1, u2 = source_vectors(params)
    e1 = np.asarray(e1, dtype=complex)
    e2 = np.asarray(e2, dtype=complex)
    source = np.multiply.outer(u1, e1) + np.multiply.outer(u2, e2)

    if method == "modal":
        eigenvalues, modes = linalg.eig(m)
        if np.linalg.cond(modes) <= MAX_EIGENBASIS_CONDITION:
            return CoherenceState.from_vector(_rk4_modal(eigenvalues, modes, source, dt))
        logger.debug("Coherence eigenbasis ill-conditioned, using explicit RK4 loop")
    elif method != "loop":
        raise ValueError(f"unknown integration method: {method}")

    return CoherenceState.from_vector(_rk4_loop(m, source, dt))


def _rk4_modal(eigenvalues: np.ndarray, modes: np.ndarray, source: np.ndarray, dt: float) -> np.ndarray:
    mu = dt * eigenvalues
    growth = 1 + mu + mu ** 2 / 2 + mu ** 3 / 6 + mu ** 4 / 24
    weight_prev = dt / 6 * (3 + 2 * mu + 0.75 * mu ** 2 + 0.25 * mu ** 3)
    weight_next = dt / 6 * (3 + mu + 0.25 * mu ** 2)

    projected = linalg.solve(modes, source)
    drive = np.zeros_like(projected)
    drive[:, 1:] = weight_prev[:, None] * projected[:, :-1] + weight_next[:, None] * projected[:, 1:]

    modal = np.empty_like(drive)
    for j in range(len(eigenvalues)):
        modal[j] = lfilter([1.0 + 0j], [1.0 + 0j, -growth[j]], drive[j])
    return modes @ modal


def _rk4_loop(m: np.ndarray, source: np.ndarray, dt: float) -> np.ndarray:
    n = source.shape[1]
    out = np.zeros((4, n), dtype=complex)
    x = np.zeros(4, dtype=complex)
    for k in range(n - 1):
        s0 = source[:, k]
        s1 = source[:, k + 1]
        sm = 0.5 * (s0 + s1)
        k1 = m @ x + s0
        k2 = m @ (x + 0.5 * dt * k1) + sm
        k3 = m @ (x + 0.5 * dt * k2) + sm
        k4 = m @ (x + dt * k3) + s1
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[:, k + 1] = x
    return out

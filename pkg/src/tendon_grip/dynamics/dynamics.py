"""
Lagrangian dynamics of a planar link chain in absolute-angle coordinates.

Link i has length L_i, mass m_i, centre of mass d_i from its proximal joint and
inertia I_i about its centre of mass. Gravity acts along -y; the potential datum
is y = 0. With

    a_i = m_i d_i + (sum_{k>i} m_k) L_i              first moment carried by link i
    C_ii = I_i + m_i d_i^2 + (sum_{k>i} m_k) L_i^2
    C_ij = L_min(i,j) * a_max(i,j)                   i != j

the equations of motion tau = M(theta) theta_ddot + c(theta, theta_dot) + G(theta) are

    M_ij = C_ij cos(theta_i - theta_j)
    c_i  = sum_j C_ij sin(theta_i - theta_j) theta_dot_j^2
    G_i  = g a_i cos(theta_i)

Forward dynamics integrates theta_ddot = M^-1 (tau - c - G) with classical
fixed-step RK4. Trajectories record kinetic, potential and total energy at every
sample.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from tendon_grip.hand_model.hand_model import JointState, LinkChain, check_dimension

logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-4
DEFAULT_HOLD_KP = 1.0  # N*m/rad
DEFAULT_HOLD_KD = 0.1  # N*m*s/rad

TorqueProgram = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


class SimulationDivergedError(ArithmeticError):
    """The integrated state stopped being finite."""

    def __init__(self, step: int, time: float, message: str = ""):
        self.step = step
        self.time = time
        detail = f": {message}" if message else ""
        super().__init__(
            f"simulation diverged at step {step} (t = {time:.6g} s){detail}"
        )


@dataclass(frozen=True)
class EomTerms:
    """Mass matrix, Coriolis/centrifugal vector and gravity vector at one state."""

    mass_matrix: np.ndarray
    coriolis_vector: np.ndarray
    gravity_vector: np.ndarray


@dataclass(frozen=True)
class DynamicsTrajectory:
    """Time series of a simulation, one row per sample."""

    time: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    theta_ddot: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray
    applied_torques: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.kinetic + self.potential

    @property
    def n_samples(self) -> int:
        return len(self.time)

    def state(self, k: int) -> JointState:
        return JointState(self.theta[k], self.theta_dot[k], self.theta_ddot[k])

    def to_frame(self) -> pd.DataFrame:
        """Trajectory as a table with the CSV column names."""
        n = self.theta.shape[1]
        columns = {"t_s": self.time}
        for i in range(n):
            columns[f"theta{i + 1}_rad"] = self.theta[:, i]
        for i in range(n):
            columns[f"omega{i + 1}"] = self.theta_dot[:, i]
        for i in range(n):
            columns[f"tau{i + 1}"] = self.applied_torques[:, i]
        columns["ke_j"] = self.kinetic
        columns["pe_j"] = self.potential
        columns["e_total_j"] = self.total
        return pd.DataFrame(columns)


# === Chain constants ===
def _distal_mass(chain: LinkChain) -> np.ndarray:
    """Mass of all links beyond link i, for each i."""
    masses = np.asarray(chain.masses)
    return np.concatenate((np.cumsum(masses[::-1])[::-1][1:], [0.0]))


def first_moments(chain: LinkChain) -> np.ndarray:
    """a_i = m_i d_i + (mass beyond link i) * L_i."""
    masses = np.asarray(chain.masses)
    return masses * np.asarray(chain.com_offsets) + _distal_mass(chain) * np.asarray(
        chain.lengths
    )


def coupling_coefficients(chain: LinkChain) -> np.ndarray:
    """The configuration-independent coefficients C_ij of the mass matrix."""
    n = chain.n_links
    lengths = np.asarray(chain.lengths)
    a = first_moments(chain)
    idx = np.arange(n)
    lo = np.minimum.outer(idx, idx)
    hi = np.maximum.outer(idx, idx)
    coeffs = lengths[lo] * a[hi]
    diagonal = (
        np.asarray(chain.inertias)
        + np.asarray(chain.masses) * np.asarray(chain.com_offsets) ** 2
        + _distal_mass(chain) * lengths**2
    )
    coeffs[idx, idx] = diagonal
    return coeffs


# === Energies ===
def com_velocities(chain: LinkChain, state: JointState) -> np.ndarray:
    """Velocity of every link's centre of mass, shape (n_links, 2)."""
    state.check_against(chain)
    theta = np.asarray(state.theta)
    omega = np.asarray(state.theta_dot)
    tangents = np.column_stack((-np.sin(theta), np.cos(theta)))
    joint_terms = (np.asarray(chain.lengths) * omega)[:, None] * tangents
    own_terms = (np.asarray(chain.com_offsets) * omega)[:, None] * tangents
    return np.cumsum(joint_terms, axis=0) - joint_terms + own_terms


def kinetic_energy(chain: LinkChain, state: JointState) -> float:
    """Translational plus rotational kinetic energy of the chain (J)."""
    velocities = com_velocities(chain, state)
    omega = np.asarray(state.theta_dot)
    translational = np.asarray(chain.masses) * np.sum(velocities**2, axis=1)
    rotational = np.asarray(chain.inertias) * omega**2
    return 0.5 * float(np.sum(translational + rotational))


def potential_energy(chain: LinkChain, theta_abs: Sequence[float], gravity: float) -> float:
    """Gravitational potential energy with the datum at y = 0 (J)."""
    theta = check_dimension(chain, theta_abs, "theta_abs")
    lengths = np.asarray(chain.lengths)
    rises = lengths * np.sin(theta)
    heights = np.cumsum(rises) - rises + np.asarray(chain.com_offsets) * np.sin(theta)
    return gravity * float(np.dot(chain.masses, heights))


# === Equations of motion ===
def _eom_arrays(coeffs, moments, theta, omega, gravity):
    delta = np.subtract.outer(theta, theta)
    mass_matrix = coeffs * np.cos(delta)
    coriolis = (coeffs * np.sin(delta)) @ omega**2
    gravity_vector = gravity * moments * np.cos(theta)
    return mass_matrix, coriolis, gravity_vector


def eom_terms(chain: LinkChain, state: JointState, gravity: float) -> EomTerms:
    """Closed-form M(theta), c(theta, theta_dot) and G(theta)."""
    state.check_against(chain)
    return EomTerms(
        *_eom_arrays(
            coupling_coefficients(chain),
            first_moments(chain),
            np.asarray(state.theta),
            np.asarray(state.theta_dot),
            gravity,
        )
    )


def gravity_torques(chain: LinkChain, theta_abs: Sequence[float], gravity: float) -> np.ndarray:
    """G(theta): the torques that hold the chain still against gravity."""
    theta = check_dimension(chain, theta_abs, "theta_abs")
    return gravity * first_moments(chain) * np.cos(theta)


def inverse_dynamics(chain: LinkChain, state: JointState, gravity: float) -> np.ndarray:
    """Joint torques that realise the state's accelerations."""
    terms = eom_terms(chain, state, gravity)
    return (
        terms.mass_matrix @ np.asarray(state.theta_ddot)
        + terms.coriolis_vector
        + terms.gravity_vector
    )


def forward_acceleration(
    chain: LinkChain,
    theta: Sequence[float],
    theta_dot: Sequence[float],
    torques: Sequence[float],
    gravity: float,
) -> np.ndarray:
    """theta_ddot = M^-1 (tau - c - G)."""
    tau = check_dimension(chain, torques, "torques")
    terms = eom_terms(chain, JointState(theta, theta_dot), gravity)
    return np.linalg.solve(
        terms.mass_matrix, tau - terms.coriolis_vector - terms.gravity_vector
    )


# === Integration ===
def _state_derivative(
    chain: LinkChain, gravity: float, program: TorqueProgram
) -> Callable[[float, np.ndarray], np.ndarray]:
    n = chain.n_links
    coeffs = coupling_coefficients(chain)
    moments = first_moments(chain)

    def derivative(t: float, y: np.ndarray) -> np.ndarray:
        theta, omega = y[:n], y[n:]
        if not np.all(np.isfinite(y)):
            return np.full_like(y, np.nan)
        tau = np.asarray(program(t, theta, omega), dtype=float)
        mass_matrix, coriolis, gravity_vector = _eom_arrays(
            coeffs, moments, theta, omega, gravity
        )
        alpha = np.linalg.solve(mass_matrix, tau - coriolis - gravity_vector)
        return np.concatenate((omega, alpha))

    return derivative


def _rk4_step(f, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + dt / 2, y + dt * k1 / 2)
    k3 = f(t + dt / 2, y + dt * k2 / 2)
    k4 = f(t + dt, y + dt * k3)
    return y + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def forward_dynamics_step(
    chain: LinkChain,
    theta: Sequence[float],
    theta_dot: Sequence[float],
    torques: Sequence[float],
    gravity: float,
    dt: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Advance (theta, theta_dot) by one RK4 step under constant joint torques.

    Raises:
        ValueError: If dt <= 0
        SimulationDivergedError: If the new state is not finite
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    theta = check_dimension(chain, theta, "theta")
    theta_dot = check_dimension(chain, theta_dot, "theta_dot")
    tau = check_dimension(chain, torques, "torques")

    derivative = _state_derivative(chain, gravity, lambda t, q, w: tau)
    y = _rk4_step(derivative, 0.0, np.concatenate((theta, theta_dot)), dt)
    if not np.all(np.isfinite(y)):
        raise SimulationDivergedError(1, dt)
    n = chain.n_links
    return y[:n], y[n:]


def simulate(
    chain: LinkChain,
    theta0: Sequence[float],
    theta_dot0: Sequence[float],
    torque_program: TorqueProgram,
    gravity: float,
    duration: float,
    dt: float = DEFAULT_DT,
) -> DynamicsTrajectory:
    """
    Fixed-step RK4 rollout.

    Args:
        chain: Link chain to simulate
        theta0, theta_dot0: Initial absolute angles (rad) and velocities (rad/s)
        torque_program: tau = program(t, theta, theta_dot)
        gravity: Gravity magnitude (m/s^2)
        duration: Simulated time (s)
        dt: Step size (s)

    Returns:
        DynamicsTrajectory with round(duration / dt) + 1 samples

    Raises:
        ValueError: If duration or dt are not positive, or dt > duration
        SimulationDivergedError: With the failing step if the state blows up
    """
    if not duration > 0:
        raise ValueError(f"duration must be > 0, got {duration}")
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if dt > duration:
        raise ValueError(f"dt ({dt}) must not exceed duration ({duration})")

    n = chain.n_links
    theta0 = check_dimension(chain, theta0, "theta0")
    theta_dot0 = check_dimension(chain, theta_dot0, "theta_dot0")
    n_steps = max(1, int(round(duration / dt)))
    logger.info(f"Simulating {n}-link chain for {n_steps} RK4 steps of {dt} s")

    derivative = _state_derivative(chain, gravity, torque_program)
    time = np.arange(n_steps + 1) * dt
    states = np.empty((n_steps + 1, 2 * n))
    states[0] = np.concatenate((theta0, theta_dot0))

    for k in range(n_steps):
        states[k + 1] = _rk4_step(derivative, time[k], states[k], dt)
        if not np.all(np.isfinite(states[k + 1])):
            logger.error(f"Non-finite state at step {k + 1} (t = {time[k + 1]:.6g} s)")
            raise SimulationDivergedError(k + 1, float(time[k + 1]))

    theta, theta_dot = states[:, :n], states[:, n:]
    torques = np.empty((n_steps + 1, n))
    theta_ddot = np.empty((n_steps + 1, n))
    kinetic = np.empty(n_steps + 1)
    potential = np.empty(n_steps + 1)
    for k in range(n_steps + 1):
        torques[k] = torque_program(time[k], theta[k], theta_dot[k])
        theta_ddot[k] = forward_acceleration(
            chain, theta[k], theta_dot[k], torques[k], gravity
        )
        kinetic[k] = kinetic_energy(chain, JointState(theta[k], theta_dot[k]))
        potential[k] = potential_energy(chain, theta[k], gravity)

    return DynamicsTrajectory(
        time=time,
        theta=theta,
        theta_dot=theta_dot,
        theta_ddot=theta_ddot,
        kinetic=kinetic,
        potential=potential,
        applied_torques=torques,
    )


def energy_drift(trajectory: DynamicsTrajectory) -> float:
    """
    Largest deviation of K + P from its initial value, relative to the energy scale.

    The scale is max_t(|K_t| + |P_t|), which stays meaningful when the initial
    total energy is zero.
    """
    total = trajectory.total
    scale = float(np.max(np.abs(trajectory.kinetic) + np.abs(trajectory.potential)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(total - total[0]))) / scale


# === Torque programs ===
def zero_torque(chain: LinkChain) -> TorqueProgram:
    n = chain.n_links
    return lambda t, theta, omega: np.zeros(n)


def gravity_compensation(chain: LinkChain, gravity: float) -> TorqueProgram:
    return lambda t, theta, omega: gravity_torques(chain, theta, gravity)


def constant_torque(chain: LinkChain, torques: Sequence[float]) -> TorqueProgram:
    tau = check_dimension(chain, torques, "torques")
    return lambda t, theta, omega: tau.copy()


def pd_hold(
    chain: LinkChain,
    target: Sequence[float],
    gravity: float,
    kp: float = DEFAULT_HOLD_KP,
    kd: float = DEFAULT_HOLD_KD,
) -> TorqueProgram:
    """PD regulation to absolute target angles plus gravity feed-forward."""
    target = check_dimension(chain, target, "target")

    def program(t, theta, omega):
        return (
            kp * (target - theta)
            - kd * np.asarray(omega)
            + gravity_torques(chain, theta, gravity)
        )

    return program


def parse_torque_program(
    text: str,
    chain: LinkChain,
    gravity: float,
    kp: float = DEFAULT_HOLD_KP,
    kd: float = DEFAULT_HOLD_KD,
) -> TorqueProgram:
    """
    Parse a torque program name.

    Accepted forms: ``zero``, ``gravity_comp``, ``constant:<tau1,...>`` (N*m) and
    ``hold:<deg1,...>`` (absolute target angles in degrees).

    Raises:
        ValueError: For unknown names or malformed value lists
    """
    name, _, values = text.partition(":")
    name = name.strip()
    if name in ("zero", "gravity_comp") and values:
        raise ValueError(f"torque program '{name}' takes no values")
    if name == "zero":
        return zero_torque(chain)
    if name == "gravity_comp":
        return gravity_compensation(chain, gravity)
    if name in ("constant", "hold"):
        try:
            numbers = [float(v) for v in values.split(",")]
        except ValueError:
            raise ValueError(f"could not parse values in torque program '{text}'")
        if not all(math.isfinite(v) for v in numbers):
            raise ValueError(f"torque program '{text}' has non-finite values")
        if name == "constant":
            return constant_torque(chain, numbers)
        return pd_hold(chain, np.radians(numbers), gravity, kp=kp, kd=kd)
    raise ValueError(
        f"unknown torque program '{text}'; "
        "expected zero, gravity_comp, constant:<values> or hold:<angles>"
    )

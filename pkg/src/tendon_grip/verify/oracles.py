"""
Numerical oracles for the closed-form dynamics.

Everything here is built from the energy functions only (kinetic_energy,
potential_energy) and from finite differences; nothing calls eom_terms or
inverse_dynamics except cross_check, which compares against them.

Euler-Lagrange torques are evaluated as

    tau_i = d/dt (dL/d theta_dot_i) - dL/d theta_i

with dL/d theta by central differences of step h, and the total time derivative
expanded by the chain rule into directional differences along theta_dot (step h
on the angles) and along theta_ddot (velocity step). K is exactly quadratic in
theta_dot, so central differences along velocities are exact for any step.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd

from tendon_grip.dynamics.dynamics import (
    DynamicsTrajectory,
    inverse_dynamics,
    kinetic_energy,
    potential_energy,
)
from tendon_grip.hand_model.hand_model import JointState, LinkChain
from tendon_grip.kinematics.kinematics import com_positions

logger = logging.getLogger(__name__)

DEFAULT_FD_STEP = 1e-6
DEFAULT_VELOCITY_STEP = 1.0
DEFAULT_TOLERANCE = 1e-6

# sampling box for cross_check
THETA_RANGE = (-np.pi, np.pi)
OMEGA_RANGE = (-5.0, 5.0)  # rad/s
ALPHA_RANGE = (-20.0, 20.0)  # rad/s^2

TorqueModel = Callable[[LinkChain, JointState, float], np.ndarray]


@dataclass(frozen=True)
class OracleReport:
    """Worst disagreement between closed-form and finite-difference torques."""

    max_relative_error: float
    worst_case_state: JointState
    samples: int

    def to_frame(self) -> pd.DataFrame:
        """The report as a single CSV row: samples, max_rel_err, worst state."""
        row = {"samples": self.samples, "max_rel_err": self.max_relative_error}
        for i, value in enumerate(self.worst_case_state.theta):
            row[f"worst_theta{i + 1}"] = value
        for i, value in enumerate(self.worst_case_state.theta_dot):
            row[f"worst_omega{i + 1}"] = value
        return pd.DataFrame([row])


def relative_error(value: np.ndarray, reference: np.ndarray) -> float:
    """max |value - reference| / max |reference|."""
    value = np.asarray(value, dtype=float)
    reference = np.asarray(reference, dtype=float)
    scale = max(float(np.max(np.abs(reference))), 1e-300)
    return float(np.max(np.abs(value - reference))) / scale


def lagrangian(chain: LinkChain, state: JointState, gravity: float) -> float:
    """L = K - P."""
    return kinetic_energy(chain, state) - potential_energy(chain, state.theta, gravity)


def _momenta(chain, theta, omega, gravity, velocity_step):
    """dL/d theta_dot by central differences in each velocity."""
    n = chain.n_links
    momenta = np.empty(n)
    for i in range(n):
        step = np.zeros(n)
        step[i] = velocity_step
        plus = lagrangian(chain, JointState(theta, omega + step), gravity)
        minus = lagrangian(chain, JointState(theta, omega - step), gravity)
        momenta[i] = (plus - minus) / (2 * velocity_step)
    return momenta


def euler_lagrange_fd(
    chain: LinkChain,
    state: JointState,
    gravity: float,
    h: float = DEFAULT_FD_STEP,
    velocity_step: float = DEFAULT_VELOCITY_STEP,
) -> np.ndarray:
    """
    Joint torques from the Euler-Lagrange equations, by finite differences only.

    Args:
        chain: Link chain
        state: Angles, velocities and accelerations
        gravity: Gravity magnitude (m/s^2)
        h: Angle step for central differences (rad)
        velocity_step: Velocity step (rad/s)

    Returns:
        Torques (N*m) per joint
    """
    if not h > 0 or not velocity_step > 0:
        raise ValueError("finite-difference steps must be > 0")
    state.check_against(chain)
    n = chain.n_links
    theta = np.asarray(state.theta)
    omega = np.asarray(state.theta_dot)
    alpha = np.asarray(state.theta_ddot)

    dl_dtheta = np.empty(n)
    for i in range(n):
        step = np.zeros(n)
        step[i] = h
        plus = lagrangian(chain, JointState(theta + step, omega), gravity)
        minus = lagrangian(chain, JointState(theta - step, omega), gravity)
        dl_dtheta[i] = (plus - minus) / (2 * h)

    # d/dt p(theta, omega) = (dp/d theta) omega + (dp/d omega) alpha
    along_omega = (
        _momenta(chain, theta + h * omega, omega, gravity, velocity_step)
        - _momenta(chain, theta - h * omega, omega, gravity, velocity_step)
    ) / (2 * h)
    along_alpha = (
        _momenta(chain, theta, omega + velocity_step * alpha, gravity, velocity_step)
        - _momenta(chain, theta, omega - velocity_step * alpha, gravity, velocity_step)
    ) / (2 * velocity_step)

    return along_omega + along_alpha - dl_dtheta


def random_states(n_links: int, samples: int, seed: int) -> Tuple[np.ndarray, ...]:
    """Reproducible (theta, omega, alpha) arrays of shape (samples, n_links)."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(*THETA_RANGE, size=(samples, n_links))
    omega = rng.uniform(*OMEGA_RANGE, size=(samples, n_links))
    alpha = rng.uniform(*ALPHA_RANGE, size=(samples, n_links))
    return theta, omega, alpha


def cross_check(
    chain: LinkChain,
    gravity: float,
    samples: int,
    seed: int,
    h: float = DEFAULT_FD_STEP,
    closed_form: Optional[TorqueModel] = None,
) -> OracleReport:
    """
    Compare closed-form inverse dynamics with the finite-difference oracle.

    Args:
        chain: Link chain
        gravity: Gravity magnitude (m/s^2)
        samples: Number of random states
        seed: Seed for the state generator
        h: Angle step of the oracle
        closed_form: Torque model under test (default: inverse_dynamics)

    Returns:
        OracleReport; ties in the error go to the lowest sample index
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    closed_form = closed_form or inverse_dynamics

    thetas, omegas, alphas = random_states(chain.n_links, samples, seed)
    errors = np.empty(samples)
    for k in range(samples):
        state = JointState(thetas[k], omegas[k], alphas[k])
        errors[k] = relative_error(
            closed_form(chain, state, gravity),
            euler_lagrange_fd(chain, state, gravity, h=h),
        )

    worst = int(np.argmax(errors))
    logger.info(
        f"Cross-checked {samples} states (seed {seed}): "
        f"max relative error {errors[worst]:.3e} at sample {worst}"
    )
    return OracleReport(
        max_relative_error=float(errors[worst]),
        worst_case_state=JointState(thetas[worst], omegas[worst], alphas[worst]),
        samples=samples,
    )


def fd_convergence(
    chain: LinkChain, state: JointState, gravity: float, h: float
) -> Tuple[float, float, float]:
    """
    Oracle discrepancy at steps h and h/2, and their ratio.

    For a second-order oracle the ratio is close to 4 while truncation error
    dominates round-off.
    """
    reference = inverse_dynamics(chain, state, gravity)
    coarse = float(np.max(np.abs(euler_lagrange_fd(chain, state, gravity, h=h) - reference)))
    fine = float(
        np.max(np.abs(euler_lagrange_fd(chain, state, gravity, h=h / 2) - reference))
    )
    ratio = coarse / fine if fine > 0 else float("inf")
    return coarse, fine, ratio


def com_velocity_fd(
    chain: LinkChain, state: JointState, h: float = DEFAULT_FD_STEP
) -> np.ndarray:
    """Centre-of-mass velocities by central differences of the COM positions."""
    state.check_against(chain)
    theta = np.asarray(state.theta)
    omega = np.asarray(state.theta_dot)
    return (
        com_positions(chain, theta + h * omega) - com_positions(chain, theta - h * omega)
    ) / (2 * h)


def kinetic_energy_fd(
    chain: LinkChain, state: JointState, h: float = DEFAULT_FD_STEP
) -> float:
    """Kinetic energy assembled from finite-difference COM velocities."""
    velocities = com_velocity_fd(chain, state, h)
    omega = np.asarray(state.theta_dot)
    return 0.5 * float(
        np.dot(chain.masses, np.sum(velocities**2, axis=1))
        + np.dot(chain.inertias, omega**2)
    )


def work_energy_audit(trajectory: DynamicsTrajectory) -> Tuple[float, float, float]:
    """
    Work done by the applied torques versus the change in total energy.

    Returns:
        (work, energy change, relative difference)
    """
    power = np.sum(trajectory.applied_torques * trajectory.theta_dot, axis=1)
    work = float(np.sum((power[1:] + power[:-1]) * np.diff(trajectory.time)) / 2)
    delta = float(trajectory.total[-1] - trajectory.total[0])
    scale = max(abs(work), abs(delta), 1e-300)
    return work, delta, abs(work - delta) / scale

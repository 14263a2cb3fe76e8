"""Tests for the closed-form equations of motion and the RK4 simulator."""
import numpy as np
import pytest

from tendon_grip.dynamics.dynamics import (
    SimulationDivergedError,
    constant_torque,
    coupling_coefficients,
    energy_drift,
    eom_terms,
    first_moments,
    forward_acceleration,
    forward_dynamics_step,
    gravity_compensation,
    gravity_torques,
    inverse_dynamics,
    kinetic_energy,
    parse_torque_program,
    pd_hold,
    potential_energy,
    simulate,
    zero_torque,
)
from tendon_grip.hand_model.hand_model import DimensionMismatchError, JointState

G = 9.81


# === Mass matrix ===
def test_mass_matrix_symmetric_positive_definite(finger_chain):
    rng = np.random.default_rng(0)
    for theta in rng.uniform(-np.pi, np.pi, size=(1000, 3)):
        mass_matrix = eom_terms(finger_chain, JointState.at_rest(theta), G).mass_matrix
        np.testing.assert_allclose(mass_matrix, mass_matrix.T, rtol=1e-15, atol=0)
        assert np.all(np.linalg.eigvalsh(mass_matrix) > 0)


def test_proximal_diagonal_carries_distal_mass(finger_chain):
    """M_11 = I_1 + m_1 d_1^2 + (m_2 + m_3) L_1^2."""
    m, L, d, inertia = (
        finger_chain.masses,
        finger_chain.lengths,
        finger_chain.com_offsets,
        finger_chain.inertias,
    )
    expected = inertia[0] + m[0] * d[0] ** 2 + (m[1] + m[2]) * L[0] ** 2
    assert coupling_coefficients(finger_chain)[0, 0] == pytest.approx(expected, rel=1e-14)
    mass_matrix = eom_terms(finger_chain, JointState.at_rest([0.3, 0.1, -0.2]), G).mass_matrix
    assert mass_matrix[0, 0] == pytest.approx(expected, rel=1e-14)


def test_first_moments(finger_chain):
    m, L, d = finger_chain.masses, finger_chain.lengths, finger_chain.com_offsets
    np.testing.assert_allclose(
        first_moments(finger_chain),
        [m[0] * d[0] + (m[1] + m[2]) * L[0], m[1] * d[1] + m[2] * L[1], m[2] * d[2]],
        rtol=1e-14,
    )


# === Energies ===
def test_single_link_kinetic_energy(unit_link):
    """K = (m d^2 + I) w^2 / 2 for a link about its joint."""
    state = JointState([0.7], [2.0])
    assert kinetic_energy(unit_link, state) == pytest.approx(0.5 * (0.25 + 1 / 12) * 4, rel=1e-14)


def test_kinetic_energy_is_quadratic_form(finger_chain):
    """K = w^T M w / 2."""
    rng = np.random.default_rng(5)
    for _ in range(50):
        state = JointState(rng.uniform(-np.pi, np.pi, 3), rng.uniform(-5, 5, 3))
        mass_matrix = eom_terms(finger_chain, state, G).mass_matrix
        omega = np.asarray(state.theta_dot)
        assert kinetic_energy(finger_chain, state) == pytest.approx(
            0.5 * omega @ mass_matrix @ omega, rel=1e-12
        )


def test_potential_energy(finger_chain):
    """Zero for a horizontal chain, g * sum(a) straight up, minus that hanging down."""
    assert potential_energy(finger_chain, [0.0, 0.0, 0.0], G) == 0.0
    up = G * float(np.sum(first_moments(finger_chain)))
    assert potential_energy(finger_chain, [np.pi / 2] * 3, G) == pytest.approx(up, rel=1e-14)
    assert potential_energy(finger_chain, [-np.pi / 2] * 3, G) == pytest.approx(-up, rel=1e-14)
    assert potential_energy(finger_chain, [np.pi / 2] * 3, 0.0) == 0.0


# === Inverse dynamics ===
def test_static_hold_horizontal(finger_chain):
    """At rest the torques are G = g a_i cos(theta_i)."""
    torques = inverse_dynamics(finger_chain, JointState.at_rest([0.0, 0.0, 0.0]), G)
    np.testing.assert_allclose(torques, G * first_moments(finger_chain), rtol=1e-14)
    assert torques[0] == pytest.approx(G * 1.59e-4, rel=1e-12)


def test_vertical_hang_needs_no_torque(finger_chain):
    torques = inverse_dynamics(finger_chain, JointState.at_rest([-np.pi / 2] * 3), G)
    np.testing.assert_allclose(torques, 0.0, rtol=0, atol=1e-15)


def test_unit_accelerations_give_mass_matrix_columns(finger_chain):
    theta = [0.4, -0.3, 1.2]
    mass_matrix = eom_terms(finger_chain, JointState.at_rest(theta), 0.0).mass_matrix
    for j in range(3):
        alpha = np.zeros(3)
        alpha[j] = 1.0
        torques = inverse_dynamics(finger_chain, JointState(theta, [0.0] * 3, alpha), 0.0)
        np.testing.assert_allclose(torques, mass_matrix[:, j], rtol=1e-14)


def test_zero_gravity_has_no_gravity_vector(finger_chain):
    terms = eom_terms(finger_chain, JointState([0.1, 0.2, 0.3], [1.0, 1.0, 1.0]), 0.0)
    np.testing.assert_array_equal(terms.gravity_vector, [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(gravity_torques(finger_chain, [0.1, 0.2, 0.3], 0.0), [0.0] * 3)


def test_forward_inverse_round_trip(finger_chain):
    rng = np.random.default_rng(21)
    for _ in range(100):
        theta = rng.uniform(-np.pi, np.pi, 3)
        omega = rng.uniform(-5, 5, 3)
        alpha = rng.uniform(-20, 20, 3)
        torques = inverse_dynamics(finger_chain, JointState(theta, omega, alpha), G)
        recovered = forward_acceleration(finger_chain, theta, omega, torques, G)
        np.testing.assert_allclose(recovered, alpha, rtol=0, atol=1e-9 * max(1.0, np.max(np.abs(alpha))))


def test_state_dimension_checked(finger_chain):
    with pytest.raises(DimensionMismatchError):
        inverse_dynamics(finger_chain, JointState.at_rest([0.0, 0.0]), G)


# === Simulation ===
def test_free_spin(unit_link):
    """Without gravity or torque a single link spins at constant rate."""
    trajectory = simulate(unit_link, [0.0], [2.0], zero_torque(unit_link), 0.0, 0.5, dt=1e-3)
    assert trajectory.n_samples == 501
    np.testing.assert_allclose(trajectory.theta[:, 0], 2.0 * trajectory.time, rtol=0, atol=1e-12)
    np.testing.assert_allclose(trajectory.theta_dot[:, 0], 2.0, rtol=0, atol=1e-12)


def test_gravity_compensation_is_equilibrium(finger_chain):
    theta0 = [0.3, 0.9, 1.4]
    trajectory = simulate(
        finger_chain, theta0, [0.0] * 3, gravity_compensation(finger_chain, G), G, 0.1, dt=1e-3
    )
    np.testing.assert_allclose(trajectory.theta[-1], theta0, rtol=0, atol=1e-12)
    np.testing.assert_allclose(trajectory.theta_dot[-1], 0.0, rtol=0, atol=1e-12)


def test_energy_conserved_without_gravity(finger_chain):
    trajectory = simulate(
        finger_chain, [0.2, 0.5, 0.9], [1.0, -2.0, 3.0], zero_torque(finger_chain), 0.0, 1.0
    )
    assert trajectory.n_samples == 10001
    assert energy_drift(trajectory) <= 1e-6


def test_energy_conserved_with_gravity(finger_chain):
    """Released near the hanging pose, K + P stays constant."""
    theta0 = np.full(3, -np.pi / 2) + [0.1, -0.05, 0.08]
    trajectory = simulate(finger_chain, theta0, [0.0] * 3, zero_torque(finger_chain), G, 1.0)
    assert energy_drift(trajectory) <= 1e-6


def test_single_pendulum_released_horizontal(unit_link):
    """Zero initial energy is still a well-defined drift reference."""
    trajectory = simulate(unit_link, [0.0], [0.0], zero_torque(unit_link), G, 1.0)
    assert trajectory.total[0] == 0.0
    assert trajectory.potential.min() < 0.0
    assert energy_drift(trajectory) <= 1e-6


def test_trajectory_frame(finger_chain):
    trajectory = simulate(
        finger_chain, [0.0] * 3, [0.0] * 3, constant_torque(finger_chain, [1e-4, 0, 0]), 0.0, 0.01, dt=1e-3
    )
    frame = trajectory.to_frame()
    assert list(frame.columns) == [
        "t_s",
        "theta1_rad", "theta2_rad", "theta3_rad",
        "omega1", "omega2", "omega3",
        "tau1", "tau2", "tau3",
        "ke_j", "pe_j", "e_total_j",
    ]
    assert len(frame) == 11
    np.testing.assert_allclose(frame["tau1"], 1e-4)
    np.testing.assert_allclose(frame["e_total_j"], frame["ke_j"] + frame["pe_j"])


def test_accelerations_recorded(finger_chain):
    trajectory = simulate(finger_chain, [0.0] * 3, [0.0] * 3, zero_torque(finger_chain), G, 0.01, dt=1e-3)
    np.testing.assert_allclose(
        trajectory.theta_ddot[0],
        forward_acceleration(finger_chain, [0.0] * 3, [0.0] * 3, [0.0] * 3, G),
        rtol=1e-14,
    )
    assert trajectory.state(0).theta == (0.0, 0.0, 0.0)


def test_divergence_raises(finger_chain):
    n = finger_chain.n_links
    with pytest.raises(SimulationDivergedError) as excinfo:
        simulate(finger_chain, [0.0] * n, [0.0] * n, lambda t, q, w: np.full(n, np.nan), G, 0.01)
    assert excinfo.value.step == 1
    assert excinfo.value.time == pytest.approx(1e-4)


@pytest.mark.parametrize("duration, dt", [(0.0, 1e-4), (1.0, 0.0), (1.0, -1e-4), (1e-3, 1e-2)])
def test_invalid_time_arguments(finger_chain, duration, dt):
    with pytest.raises(ValueError):
        simulate(finger_chain, [0.0] * 3, [0.0] * 3, zero_torque(finger_chain), G, duration, dt=dt)


def test_single_step_matches_simulate(finger_chain):
    theta, omega = forward_dynamics_step(finger_chain, [0.1, 0.2, 0.3], [0.0] * 3, [0.0] * 3, G, 1e-4)
    trajectory = simulate(finger_chain, [0.1, 0.2, 0.3], [0.0] * 3, zero_torque(finger_chain), G, 1e-4)
    np.testing.assert_array_equal(theta, trajectory.theta[1])
    np.testing.assert_array_equal(omega, trajectory.theta_dot[1])


# === Torque programs ===
def test_parse_torque_program(finger_chain):
    theta = np.array([0.0, 0.0, 0.0])
    omega = np.zeros(3)
    np.testing.assert_array_equal(parse_torque_program("zero", finger_chain, G)(0.0, theta, omega), [0.0] * 3)
    np.testing.assert_allclose(
        parse_torque_program("gravity_comp", finger_chain, G)(0.0, theta, omega),
        G * first_moments(finger_chain),
    )
    np.testing.assert_array_equal(
        parse_torque_program("constant:0.1,0.2,0.3", finger_chain, G)(1.0, theta, omega), [0.1, 0.2, 0.3]
    )
    # at its own target and at rest the hold program is pure gravity feed-forward
    hold = parse_torque_program("hold:0,0,0", finger_chain, G)
    np.testing.assert_allclose(hold(0.0, theta, omega), G * first_moments(finger_chain))


@pytest.mark.parametrize("text", ["spin", "constant:a,b,c", "constant:", "zero:1", "hold:0,nan,0"])
def test_parse_torque_program_rejects(finger_chain, text):
    with pytest.raises(ValueError):
        parse_torque_program(text, finger_chain, G)


def test_constant_program_needs_one_value_per_joint(finger_chain):
    with pytest.raises(DimensionMismatchError):
        parse_torque_program("constant:0.1,0.2", finger_chain, G)


def test_pd_hold_pulls_towards_target(finger_chain):
    program = pd_hold(finger_chain, [0.5, 0.5, 0.5], 0.0, kp=2.0, kd=0.0)
    np.testing.assert_allclose(program(0.0, np.zeros(3), np.zeros(3)), [1.0, 1.0, 1.0])


def test_pd_hold_with_light_gains_approaches_target(finger_chain):
    target = np.radians([10.0, 20.0, 30.0])
    program = pd_hold(finger_chain, target, G, kp=1e-4, kd=1e-6)
    trajectory = simulate(finger_chain, [0.0] * 3, [0.0] * 3, program, G, 0.05)
    assert np.all(np.isfinite(trajectory.theta))
    assert np.linalg.norm(trajectory.theta[-1] - target) < np.linalg.norm(target)

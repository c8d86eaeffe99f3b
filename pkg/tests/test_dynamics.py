import itertools

import numpy as np
import pytest

from rotorbench.dynamics import (
    BodyState,
    aero_effects,
    angular_step,
    body_torque,
    kinetic_energy,
    step,
)
from tests.test_config import make_config


def brute_force_effects(w, b):
    """Sign-table oracle for the X-quad effect equations."""
    signs = {
        "t": (1, 1, 1, 1),
        "phi": (1, 1, -1, -1),
        "theta": (1, -1, 1, -1),
        "psi": (1, -1, -1, 1),
    }
    return tuple(
        b * sum(s * w[i] ** 2 for i, s in enumerate(signs[key]))
        for key in ("t", "phi", "theta", "psi")
    )


class TestAeroEffects:
    def test_symmetric_rotors_cancel(self):
        assert aero_effects([1, 1, 1, 1], 1.0) == (4, 0, 0, 0)

    def test_front_pair_direct_substitution(self):
        assert aero_effects([1, 1, 0, 0], 1.0) == (2, 2, 0, 0)

    def test_hand_evaluated_yaw_pair(self):
        u_t, u_phi, u_theta, u_psi = aero_effects([1, 0, 0, 1], 2.0)
        assert (u_t, u_phi, u_theta, u_psi) == (4, 0, 0, 4)
        assert aero_effects([1, 0, 0, 1], 2.0) == brute_force_effects([1, 0, 0, 1], 2.0)

    def test_matches_sign_table_oracle_on_random_speeds(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            w = rng.uniform(0, 3000, size=4)
            b = rng.uniform(1e-7, 1e-5)
            assert np.allclose(aero_effects(w, b), brute_force_effects(w, b))

    def test_thrust_effect_non_negative(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            w = rng.uniform(0, 1000, size=4)
            assert aero_effects(w, 1e-6)[0] >= 0

    def test_roll_flips_under_pair_swap(self):
        rng = np.random.default_rng(2)
        w = rng.uniform(0, 100, size=4)
        _, u_phi, _, _ = aero_effects(w, 1.0)
        swapped = [w[2], w[3], w[0], w[1]]
        _, u_phi_s, _, _ = aero_effects(swapped, 1.0)
        assert u_phi_s == pytest.approx(-u_phi)

    def test_pitch_flips_under_pair_swap(self):
        rng = np.random.default_rng(3)
        w = rng.uniform(0, 100, size=4)
        _, _, u_theta, _ = aero_effects(w, 1.0)
        swapped = [w[1], w[0], w[3], w[2]]
        _, _, u_theta_s, _ = aero_effects(swapped, 1.0)
        assert u_theta_s == pytest.approx(-u_theta)

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            aero_effects([1, 2, 3], 1.0)


class TestBodyTorque:
    def test_front_pair_roll_lever(self):
        cfg = make_config(arm_length=1.0, thrust_factor=1.0)
        tau = body_torque([1, 1, 0, 0], np.zeros(4), cfg)
        assert tau == pytest.approx([np.sqrt(2), 0, 0])

    def test_balanced_reaction_torques_cancel(self):
        cfg = make_config(spin_dirs=(1, -1, -1, 1))
        tau = body_torque(np.zeros(4), [0.05] * 4, cfg)
        assert tau[2] == pytest.approx(0.0)

    def test_signed_reaction_sum_oracle(self):
        q = 0.03
        cfg = make_config(spin_dirs=(1, 1, -1, -1))
        assert body_torque(np.zeros(4), [q] * 4, cfg)[2] == pytest.approx(0.0)
        cfg2 = make_config(spin_dirs=(1, 1, 1, -1))
        expected = sum(-s * q for s in (1, 1, 1, -1))
        assert body_torque(np.zeros(4), [q] * 4, cfg2)[2] == pytest.approx(expected)
        assert expected == pytest.approx(-2 * q)

    def test_wrong_length_rejected(self):
        cfg = make_config()
        with pytest.raises(ValueError):
            body_torque(np.zeros(3), np.zeros(3), cfg)


class TestAngularStep:
    def test_principal_axis_spin_is_fixed_point(self):
        inertia = np.diag([1e-3, 2e-3, 3e-3])
        state = BodyState(np.array([0.0, 0.0, 5.0]), np.zeros(4))
        omega = angular_step(state, np.zeros(3), inertia, 1e-3)
        assert np.allclose(omega, state.omega_body)

    def test_decoupled_first_step(self):
        a, b, c = 2e-3, 3e-3, 4e-3
        state = BodyState(np.zeros(3), np.zeros(4))
        tau = np.array([0.01, 0.0, 0.0])
        omega = angular_step(state, tau, np.diag([a, b, c]), 1e-3)
        assert omega == pytest.approx([1e-3 * 0.01 / a, 0.0, 0.0])

    def test_richardson_refinement_oracle(self):
        # Semi-implicit Euler is first order: the gap to a 10x-refined
        # solution shrinks ~10x when dt does.
        rng = np.random.default_rng(7)
        a = rng.normal(size=(3, 3))
        inertia = a @ a.T + 3 * np.eye(3)
        inertia *= 1e-3
        omega0 = rng.normal(size=3)
        tau = rng.normal(size=3) * 1e-3

        def coarse(dt):
            state = BodyState(omega0.copy(), np.zeros(4))
            return angular_step(state, tau, inertia, dt)

        def refined(dt, n=10):
            w = omega0.copy()
            for _ in range(n):
                w = angular_step(BodyState(w, np.zeros(4)), tau, inertia, dt / n)
            return w

        for dt in (1e-2, 1e-3):
            err_coarse = np.linalg.norm(coarse(dt) - refined(dt))
            err_finer = np.linalg.norm(coarse(dt / 10) - refined(dt / 10))
            ratio = err_coarse / err_finer
            assert 5 < ratio < 200
            assert err_coarse < 10 * dt

    def test_singular_inertia_rejected(self):
        state = BodyState(np.ones(3), np.zeros(4))
        with pytest.raises(ValueError, match="singular"):
            angular_step(state, np.ones(3), np.zeros((3, 3)), 1e-3)

    def test_non_positive_dt_rejected(self):
        state = BodyState(np.zeros(3), np.zeros(4))
        with pytest.raises(ValueError):
            angular_step(state, np.zeros(3), np.eye(3), 0.0)


class TestStep:
    def test_rest_stays_at_rest(self):
        cfg = make_config()
        state = BodyState.rest(4)
        out = step(state, np.zeros(4), np.zeros(4), cfg, 1e-3)
        assert np.array_equal(out.omega_body, np.zeros(3))
        assert out.t == pytest.approx(1e-3)
        assert np.array_equal(out.rotor_omega, state.rotor_omega)

    def test_constant_roll_torque_accumulates_linearly(self):
        # Pure roll spin on a diagonal-inertia body has no gyroscopic
        # coupling, so N equal steps sum exactly.
        cfg = make_config(inertia=np.diag([2e-3, 3e-3, 4e-3]))
        dt, n = 1e-3, 250
        w = np.array([100.0, 100.0, 0.0, 0.0])  # front pair: pure roll effect
        state = BodyState(np.zeros(3), w)
        for _ in range(n):
            state = step(state, np.zeros(4), np.zeros(4), cfg, dt)
        tau_phi = cfg.arm_length * np.cos(np.pi / 4) * cfg.thrust_factor * 2 * 100.0**2
        expected = n * dt * tau_phi / 2e-3
        assert state.omega_body[0] == pytest.approx(expected, rel=1e-9)
        assert state.omega_body[1:] == pytest.approx([0.0, 0.0])

    def test_long_run_stays_finite(self):
        cfg = make_config()
        state = BodyState(np.zeros(3), np.full(4, 500.0))
        rng = np.random.default_rng(11)
        for _ in range(10_000):
            q = rng.uniform(0, 1e-4, size=4)
            state = step(state, np.zeros(4), q, cfg, 1e-3)
        assert np.all(np.isfinite(state.omega_body))

    def test_step_is_pure(self):
        cfg = make_config()
        state = BodyState(np.array([0.1, -0.2, 0.3]), np.full(4, 300.0), t=1.0)
        a = step(state, np.zeros(4), np.full(4, 1e-3), cfg, 1e-3)
        b = step(state, np.zeros(4), np.full(4, 1e-3), cfg, 1e-3)
        assert np.array_equal(a.omega_body, b.omega_body)
        assert a.t == b.t


class TestConservation:
    def test_torque_free_energy_and_momentum_drift(self):
        inertia = np.diag([1.5e-3, 2.5e-3, 3.5e-3])
        cfg = make_config(inertia=inertia)
        state = BodyState(np.array([0.5, 0.3, -0.4]), np.zeros(4))
        e0 = kinetic_energy(state, inertia)
        l0 = np.linalg.norm(inertia @ state.omega_body)
        dt = 1e-3
        for _ in range(1000):
            omega = angular_step(state, np.zeros(3), inertia, dt)
            state = BodyState(omega, state.rotor_omega, state.t + dt)
        e1 = kinetic_energy(state, inertia)
        l1 = np.linalg.norm(inertia @ state.omega_body)
        assert abs(e1 - e0) / e0 < 5e-3
        assert abs(l1 - l0) / l0 < 1e-3

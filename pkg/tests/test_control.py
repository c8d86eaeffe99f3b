import numpy as np
import pytest

from rotorbench.control import (
    PidGains,
    PidState,
    TuningError,
    detect_sustained_oscillation,
    mix,
    pid_eval,
    ultimate_gain_search,
    zn_tune,
)

# Measured stretched-frame mixer table, firmware row order.
CH3_MIXER = np.array(
    [
        [-1.0, 0.598, -1.0],
        [-0.927, -0.598, 1.0],
        [1.0, 0.598, 1.0],
        [0.927, -0.598, -1.0],
    ]
)


def uniform_gains(kp=0.0, ki=0.0, kd=0.0):
    return PidGains(kp=(kp,) * 3, ki=(ki,) * 3, kd=(kd,) * 3)


class TestPidEval:
    def test_zero_error_zero_output(self):
        out = pid_eval(PidState(), np.zeros(3), uniform_gains(1, 1, 1), 1e-3)
        assert out == pytest.approx([0, 0, 0])

    def test_pure_proportional(self):
        out = pid_eval(PidState(), [2.0, -1.0, 0.5], uniform_gains(kp=1.0), 1e-3)
        assert out == pytest.approx([2.0, -1.0, 0.5])

    def test_rectangle_rule_accumulation(self):
        state = PidState()
        gains = uniform_gains(ki=1.0)
        for _ in range(3):
            out = pid_eval(state, [1.0, 1.0, 1.0], gains, 1e-3)
        assert out == pytest.approx([0.003, 0.003, 0.003])

    def test_derivative_on_error(self):
        state = PidState()
        gains = uniform_gains(kd=1.0)
        pid_eval(state, [1.0, 0.0, 0.0], gains, 0.1)
        out = pid_eval(state, [2.0, 0.0, 0.0], gains, 0.1)
        assert out[0] == pytest.approx(10.0)  # (2-1)/0.1

    def test_p_only_is_memoryless(self):
        gains = uniform_gains(kp=3.0)
        state = PidState()
        for e in ([1.0, 2.0, 3.0], [-5.0, 0.0, 1.0], [0.25, 0.25, 0.25]):
            fresh = pid_eval(PidState(), e, gains, 1e-3)
            chained = pid_eval(state, e, gains, 1e-3)
            assert chained == pytest.approx(fresh)

    def test_state_reset(self):
        state = PidState()
        pid_eval(state, [1.0, 1.0, 1.0], uniform_gains(ki=1.0), 1e-3)
        state.reset()
        assert np.array_equal(state.integral, np.zeros(3))
        assert np.array_equal(state.prev_error, np.zeros(3))


class TestMix:
    def test_idle_pass_through(self):
        u = mix(np.zeros(3), 0.3, CH3_MIXER)
        assert u == pytest.approx([0.3, 0.3, 0.3, 0.3])

    def test_roll_column_pre_clamp(self):
        u = mix([1.0, 0.0, 0.0], 0.0, CH3_MIXER, clip=False)
        assert u == pytest.approx([-1.0, -0.927, 1.0, 0.927])

    def test_yaw_column_pre_clamp(self):
        u = mix([0.0, 0.0, 1.0], 0.0, CH3_MIXER, clip=False)
        assert u == pytest.approx([-1.0, 1.0, 1.0, -1.0])

    def test_clamped_to_unit_interval(self):
        u = mix([1.0, 0.0, 0.0], 0.0, CH3_MIXER)
        assert u == pytest.approx([0.0, 0.0, 1.0, 0.927])
        assert np.all(u >= 0.0) and np.all(u <= 1.0)

    def test_no_spurious_spinup(self):
        assert mix(np.zeros(3), 0.0, CH3_MIXER) == pytest.approx([0, 0, 0, 0])


class TestZnTune:
    def test_classic_table(self):
        assert zn_tune(10.0, 1.0) == pytest.approx((6.0, 12.0, 0.75))

    def test_second_case(self):
        assert zn_tune(1.0, 2.0) == pytest.approx((0.6, 0.6, 0.15))

    def test_linear_in_ultimate_gain(self):
        kp1, ki1, kd1 = zn_tune(3.0, 0.7)
        kp2, ki2, kd2 = zn_tune(6.0, 0.7)
        assert (kp2, ki2, kd2) == pytest.approx((2 * kp1, 2 * ki1, 2 * kd1))

    def test_non_positive_rejected(self):
        with pytest.raises(ValueError):
            zn_tune(0.0, 1.0)
        with pytest.raises(ValueError):
            zn_tune(1.0, -1.0)


def triple_lag_plant(kp, duration=60.0, dt=0.002):
    """P-controlled unity-feedback loop around 1/(s+1)^3.

    Closed-loop characteristic (s+1)^3 + K = 0 goes marginal at K_u = 8
    with oscillation frequency sqrt(3) rad/s (T_u = 2*pi/sqrt(3) ~ 3.6276).
    """
    n = int(duration / dt)
    x = np.zeros(3)
    y = np.empty(n)
    t = np.arange(1, n + 1) * dt
    setpoint = 1.0
    for i in range(n):
        e = setpoint - x[2]
        u = kp * e
        # cascade of three first-order lags, semi-implicit
        x[0] += dt * (u - x[0])
        x[1] += dt * (x[0] - x[1])
        x[2] += dt * (x[1] - x[2])
        y[i] = x[2]
    return t, y


class TestUltimateGainSearch:
    def test_recovers_triple_lag_ultimate_gain(self):
        k_u, t_u = ultimate_gain_search(triple_lag_plant, k_start=1.0, k_factor=1.15)
        assert 8.0 / 1.15**1.5 < k_u < 8.0 * 1.15**1.5
        assert t_u == pytest.approx(2 * np.pi / np.sqrt(3), rel=0.08)

    def test_first_order_plant_never_oscillates(self):
        def plant(kp, duration=10.0, dt=0.002):
            n = int(duration / dt)
            x = 0.0
            y = np.empty(n)
            t = np.arange(1, n + 1) * dt
            for i in range(n):
                x += dt * kp * (1.0 - x)
                y[i] = x
            return t, y

        with pytest.raises(TuningError):
            ultimate_gain_search(plant, k_start=0.5, k_factor=2.0, k_max=50.0)

    def test_search_is_deterministic(self):
        a = ultimate_gain_search(triple_lag_plant, k_start=1.0, k_factor=1.2)
        b = ultimate_gain_search(triple_lag_plant, k_start=1.0, k_factor=1.2)
        assert a == b

    def test_detector_rejects_decaying_ring(self):
        t = np.linspace(0, 30, 3000)
        y = np.exp(-0.3 * t) * np.sin(2 * np.pi * t)
        assert detect_sustained_oscillation(t, y) is None

    def test_detector_accepts_steady_ring(self):
        t = np.linspace(0, 30, 3000)
        y = np.sin(2 * np.pi * t / 3.0)
        period = detect_sustained_oscillation(t, y)
        assert period == pytest.approx(3.0, rel=0.02)

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotorbench.rewards import (
    RewardParams,
    RewardState,
    in_error_band,
    reward_error,
    reward_output_min,
    reward_smooth,
    reward_v1,
    reward_v2,
    reward_v3,
)

PARAMS = RewardParams()  # alpha=300, beta=0.5, delta_y_max=100^2


class TestRewardV1:
    def test_zero_error(self):
        assert reward_v1(np.zeros(3), 5.24) == 0.0

    def test_clip_boundary_at_envelope_edge(self):
        assert reward_v1([5.24, 5.24, 5.24], 5.24) == -1.0

    def test_single_axis_third(self):
        assert reward_v1([5.24, 0.0, 0.0], 5.24) == pytest.approx(-1.0 / 3.0)

    def test_bounded_over_random_errors(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            e = rng.uniform(-100, 100, size=3)
            r = reward_v1(e, 5.24)
            assert -1.0 <= r <= 0.0

    @given(st.lists(st.floats(-1e6, 1e6), min_size=3, max_size=3))
    def test_bounds_property(self, e):
        assert -1.0 <= reward_v1(e, 5.24) <= 0.0


class TestRewardError:
    def test_zero(self):
        assert reward_error(np.zeros(3)) == 0.0

    def test_pythagorean(self):
        assert reward_error([3.0, 4.0, 0.0]) == -25.0

    @given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
    def test_even_symmetry(self, e):
        assert reward_error(e) == reward_error([-v for v in e])


class TestRewardOutputMin:
    def test_full_output_earns_nothing(self):
        assert reward_output_min(np.ones(4), 300.0) == 0.0

    def test_idle_earns_alpha(self):
        assert reward_output_min(np.zeros(4), 300.0) == 300.0

    def test_half_output(self):
        assert reward_output_min([0.5] * 4, 300.0) == pytest.approx(150.0)


class TestRewardSmooth:
    def test_no_change_earns_full_allowance(self):
        assert reward_smooth(np.zeros(4), 0.5, 1e4) == pytest.approx(20000.0)

    def test_saturated_changes_earn_nothing(self):
        assert reward_smooth([100.0, -100.0, 150.0, 100.0], 0.5, 1e4) == 0.0

    def test_single_change_contribution(self):
        r = reward_smooth([50.0, 0.0, 0.0, 0.0], 0.5, 1e4)
        assert r == pytest.approx(0.5 * (1e4 - 2500) + 3 * 0.5 * 1e4)

    @given(st.lists(st.floats(-500, 500), min_size=4, max_size=4))
    def test_even_in_each_component(self, dy):
        assert reward_smooth(dy, 0.5, 1e4) == pytest.approx(
            reward_smooth([-v for v in dy], 0.5, 1e4)
        )

    def test_non_increasing_in_magnitude(self):
        mags = np.linspace(0, 200, 50)
        vals = [reward_smooth([m, 0, 0, 0], 0.5, 1e4) for m in mags]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_bounded(self):
        rng = np.random.default_rng(1)
        hi = 0.5 * 4 * 1e4
        for _ in range(500):
            dy = rng.uniform(-300, 300, size=4)
            assert 0.0 <= reward_smooth(dy, 0.5, 1e4) <= hi


class TestRewardV2:
    def test_out_of_band_is_error_only(self):
        r = reward_v2([1.0, 0.0, 0.0], np.ones(4), np.zeros(4), False, PARAMS)
        assert r == -1.0

    def test_in_band_perfect_step(self):
        r = reward_v2(np.zeros(3), np.zeros(4), np.zeros(4), True, PARAMS)
        assert r == pytest.approx(300.0 + 20000.0)

    def test_gating_identity(self):
        e, y, dy = [2.0, -1.0, 0.5], [0.25] * 4, [10.0, 0.0, -5.0, 0.0]
        gated = reward_v2(e, y, dy, True, PARAMS)
        ungated = reward_v2(e, y, dy, False, PARAMS)
        bonus = reward_output_min(y, PARAMS.alpha) + reward_smooth(
            dy, PARAMS.beta, PARAMS.delta_y_max
        )
        assert gated == pytest.approx(ungated + bonus)


class TestErrorBand:
    def test_inside(self):
        assert in_error_band([4.0, -4.0, 0.5], [50.0, 50.0, 50.0], 0.1)

    def test_one_axis_out(self):
        assert not in_error_band([6.0, 0.0, 0.0], [50.0, 50.0, 50.0], 0.1)

    def test_zero_setpoint_never_in_band(self):
        assert not in_error_band([0.0, 0.0, 0.0], [0.0, 0.0, 0.0], 0.1)


class TestRewardV3:
    def test_saturation_penalty_on_raw_output(self):
        state = RewardState()
        r, _ = reward_v3(
            state, [100.0, 0, 0], np.full(4, 0.5), [1.5, 0.0, 0.0, 0.0],
            [500.0, 0, 0], PARAMS,
        )
        # dominated by -max_penalty * 0.5
        assert r == pytest.approx(-0.5e9, rel=1e-3)

    def test_all_saturated_motors_penalized(self):
        r, _ = reward_v3(
            RewardState(), np.zeros(3), np.ones(4), np.ones(4), [10.0, 0, 0], PARAMS
        )
        assert r <= -PARAMS.max_penalty

    def test_idle_motors_no_penalty_with_zero_setpoint(self):
        r, _ = reward_v3(
            RewardState(), [1.0, 1.0, 1.0], np.zeros(4), np.zeros(4),
            np.zeros(3), PARAMS,
        )
        assert r > -PARAMS.max_penalty

    def test_idle_motors_penalized_under_command(self):
        r, _ = reward_v3(
            RewardState(), [1.0, 0, 0], np.array([0.0, 0.0, 0.0, 0.5]),
            np.zeros(4), [100.0, 0, 0], PARAMS,
        )
        assert r <= -PARAMS.max_penalty

    def test_two_idle_motors_allowed(self):
        r, _ = reward_v3(
            RewardState(), [1.0, 0, 0], np.array([0.4, 0.0, 0.4, 0.0]),
            np.zeros(4), [100.0, 0, 0], PARAMS,
        )
        assert r > -PARAMS.max_penalty

    def test_progress_term_rewards_shrinking_error(self):
        state = RewardState()
        u = np.full(4, 0.3)
        state.prev_u = u.copy()
        r1, state = reward_v3(state, [10.0, 0, 0], u, u, [100.0, 0, 0], PARAMS)
        r2, state = reward_v3(state, [5.0, 0, 0], u, u, [100.0, 0, 0], PARAMS)
        # error fell from 100 to 25: progress = -25 - (-100) = +75
        assert r2 == pytest.approx(75.0)

    def test_in_band_branch_replaces_accumulated_terms(self):
        state = RewardState(prev_error_sum=-400.0, prev_u=np.full(4, 0.2))
        e = [1.0, 1.0, 1.0]
        u = np.full(4, 0.25)
        r, _ = reward_v3(state, e, u, u, [50.0, 50.0, 50.0], PARAMS)
        assert r == pytest.approx(PARAMS.alpha * (1 - 0.25))

    def test_delta_u_penalty(self):
        state = RewardState(prev_error_sum=0.0, prev_u=np.zeros(4))
        r, _ = reward_v3(state, np.zeros(3), np.array([0.3, 0.1, 0.0, 0.0]),
                         np.zeros(4), np.zeros(3), PARAMS)
        assert r == pytest.approx(-PARAMS.beta * 0.3)

    def test_telescoping_identity_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            state = RewardState()
            stored = [state.prev_error_sum]
            steps = rng.integers(5, 40)
            for _k in range(steps):
                e = rng.uniform(-50, 50, size=3)
                u = rng.uniform(0.05, 0.95, size=4)
                _, state = reward_v3(state, e, u, u, [1000.0, 1000.0, 1000.0], PARAMS)
                stored.append(state.prev_error_sum)
            # the stored r_e sequence telescopes exactly in exact arithmetic
            total = sum(
                Fraction(b) - Fraction(a) for a, b in zip(stored, stored[1:])
            )
            assert total == Fraction(stored[-1]) - Fraction(stored[0])
            # and each stored value is the squared-error sum it claims to be
            assert stored[-1] <= 0.0

    def test_no_nan_for_finite_inputs(self):
        rng = np.random.default_rng(6)
        for _ in range(500):
            e = rng.uniform(-1e4, 1e4, size=3)
            u = rng.uniform(0, 1, size=4)
            a = rng.uniform(-2, 2, size=4)
            sp = rng.uniform(-1e3, 1e3, size=3)
            r, _ = reward_v3(RewardState(), e, u, a, sp, PARAMS)
            assert np.isfinite(r)
        assert np.isfinite(reward_v1(rng.uniform(-1e6, 1e6, 3), 5.24))
        assert np.isfinite(reward_v2(e, u, a, True, PARAMS))


class TestParams:
    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            RewardParams(alpha=0.0)
        with pytest.raises(ValueError):
            RewardParams(epsilon=1.5)
        with pytest.raises(ValueError):
            RewardParams(delta_y_max=-1.0)

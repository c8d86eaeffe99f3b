import math

import numpy as np
import pytest

from rotorbench.policy import (
    MlpPolicy,
    PolicyError,
    build_input,
    dumps_policy,
    init_policy,
    load_policy,
    loads_policy,
    policy_forward,
    save_policy,
    throttle_mix,
    transform_output,
)


def reference_forward(policy, x):
    """Independently coded forward pass: explicit loops, no vectorization."""
    h = list(map(float, x))
    for w, b, act in zip(policy.weights, policy.biases, policy.activations):
        out = []
        for i in range(w.shape[0]):
            s = b[i]
            for j in range(w.shape[1]):
                s += w[i, j] * h[j]
            out.append(math.tanh(s) if act == "tanh" else s)
        h = out
    return np.array(h)


class TestBuildInput:
    def test_first_step_duplicates_error(self):
        x = build_input([10.0, 0.0, 0.0], np.zeros(3))
        assert x == pytest.approx([10, 0, 0, 10, 0, 0])

    def test_unchanged_error_zeroes_delta(self):
        x = build_input([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert x[3:] == pytest.approx([0, 0, 0])

    def test_componentwise_subtraction(self):
        x = build_input([1.0, 2.0, 3.0], [0.5, 2.0, 4.0])
        assert x == pytest.approx([1, 2, 3, 0.5, 0, -1])


class TestForward:
    def test_zero_network_outputs_zero(self):
        policy = MlpPolicy(
            weights=(np.zeros((8, 6)), np.zeros((4, 8))),
            biases=(np.zeros(8), np.zeros(4)),
            activations=("tanh", "linear"),
        )
        assert policy_forward(policy, np.ones(6)) == pytest.approx(np.zeros(4))

    def test_single_active_unit(self):
        w1 = np.zeros((8, 6))
        b1 = np.zeros(8)
        b1[2] = 0.7
        w2 = np.zeros((4, 8))
        w2[1, 2] = 2.5
        policy = MlpPolicy((w1, w2), (b1, np.zeros(4)), ("tanh", "linear"))
        out = policy_forward(policy, np.ones(6))
        assert out[1] == pytest.approx(2.5 * math.tanh(0.7))
        assert out[[0, 2, 3]] == pytest.approx([0, 0, 0])

    def test_matches_second_implementation(self):
        rng = np.random.default_rng(4)
        policy = init_policy((64, 64), 4, rng=rng)
        for _ in range(10):
            x = rng.normal(size=6) * 50
            assert policy_forward(policy, x) == pytest.approx(
                reference_forward(policy, x), abs=1e-12
            )

    def test_dimension_mismatch_rejected(self):
        policy = init_policy((8,), 4)
        with pytest.raises(PolicyError):
            policy_forward(policy, np.ones(5))

    def test_jacobian_matches_central_differences(self):
        rng = np.random.default_rng(9)
        policy = init_policy((16, 16), 4, rng=rng)
        x = rng.normal(size=6)

        def analytic_jacobian():
            jac = np.eye(6)
            h = x.copy()
            for w, b, act in zip(policy.weights, policy.biases, policy.activations):
                pre = w @ h + b
                if act == "tanh":
                    h = np.tanh(pre)
                    jac = (np.diag(1 - h**2) @ w) @ jac
                else:
                    h = pre
                    jac = w @ jac
            return jac

        jac = analytic_jacobian()
        eps = 1e-6
        for j in range(6):
            dx = np.zeros(6)
            dx[j] = eps
            fd = (policy_forward(policy, x + dx) - policy_forward(policy, x)) / eps
            fd_c = (
                policy_forward(policy, x + dx) - policy_forward(policy, x - dx)
            ) / (2 * eps)
            assert fd_c == pytest.approx(jac[:, j], rel=1e-6, abs=1e-6)
        # Lipschitz bound: spectral-norm product dominates the Jacobian norm
        bound = 1.0
        for w in policy.weights:
            bound *= np.linalg.svd(w, compute_uv=False)[0]
        assert np.linalg.norm(jac, 2) <= bound + 1e-9


class TestTransformOutput:
    def test_lower_bound(self):
        assert transform_output([-1, -1, -1, -1]) == pytest.approx([0, 0, 0, 0])

    def test_midpoint(self):
        assert transform_output(np.zeros(4)) == pytest.approx([0.5] * 4)

    def test_saturation(self):
        assert transform_output([2.0]) == pytest.approx([1.0])
        assert transform_output([-3.0]) == pytest.approx([0.0])

    def test_monotone_and_idempotent_on_clipped(self):
        ys = np.linspace(-1, 1, 41)
        us = transform_output(ys)
        assert np.all(np.diff(us) >= 0)
        assert transform_output(2 * us - 1) == pytest.approx(us)


class TestThrottleMix:
    def test_uniform_outputs(self):
        t_hat, u = throttle_mix([0.2, 0.2, 0.2, 0.2], 0.5)
        assert t_hat == pytest.approx(0.4)
        assert u == pytest.approx([0.6, 0.6, 0.6, 0.6])

    def test_saturated_output_blocks_throttle(self):
        t_hat, u = throttle_mix([1.0, 0.3, 0.3, 0.3], 0.9)
        assert t_hat == 0.0
        assert u == pytest.approx([1.0, 0.3, 0.3, 0.3])

    def test_zero_throttle_passes_outputs(self):
        _, u = throttle_mix([0.1, 0.4, 0.7, 0.2], 0.0)
        assert u == pytest.approx([0.1, 0.4, 0.7, 0.2])

    def test_never_exceeds_one_on_grid(self):
        grid = np.linspace(0, 1, 101)
        for t in grid:
            y_max = grid
            # vectorized worst case: u_max = t*(1-ymax) + ymax <= 1
            u_max = t * (1 - y_max) + y_max
            assert np.all(u_max <= 1.0 + 1e-12)
        # spot-check the full mixing on a coarse grid of vectors
        for t in np.linspace(0, 1, 11):
            for y0 in np.linspace(0, 1, 11):
                _, u = throttle_mix([y0, 0.5, 0.25, 1.0 - y0], t)
                assert np.all(u <= 1.0 + 1e-12)
                assert np.all(u >= 0.0)


class TestWeightsFile:
    def test_structural_load(self, tmp_path):
        policy = init_policy((64, 64), 4)
        path = tmp_path / "policy.txt"
        save_policy(policy, path)
        loaded = load_policy(path)
        assert loaded.layer_sizes == (6, 64, 64, 4)
        assert loaded.activations == ("tanh", "tanh", "linear")
        assert all(
            np.array_equal(a, b) for a, b in zip(loaded.weights, policy.weights)
        )

    def test_round_trip_byte_identical(self, tmp_path):
        policy = init_policy((8,), 4, rng=np.random.default_rng(3))
        text = dumps_policy(policy)
        assert dumps_policy(loads_policy(text)) == text

    def test_wrong_input_width_rejected(self):
        policy = init_policy((8,), 4)
        text = dumps_policy(policy).replace("mlp 6 8 4", "mlp 5 8 4", 1).replace(
            "layer 0 tanh 6 8", "layer 0 tanh 5 8", 1
        )
        # rows still carry 6 values; trim one per weight row to make dims honest
        lines = text.splitlines()
        out = []
        in_layer0 = False
        count = 0
        for ln in lines:
            if ln.startswith("layer 0"):
                in_layer0 = True
                out.append(ln)
                continue
            if in_layer0 and count < 8:
                out.append(" ".join(ln.split()[:5]))
                count += 1
                continue
            out.append(ln)
        with pytest.raises(PolicyError, match="input width"):
            loads_policy("\n".join(out))

    def test_unknown_activation_rejected(self):
        text = dumps_policy(init_policy((8,), 4)).replace("layer 0 tanh", "layer 0 selu")
        with pytest.raises(PolicyError, match="activation"):
            loads_policy(text)

    def test_dimension_mismatch_rejected(self):
        text = dumps_policy(init_policy((8,), 4)).replace(
            "layer 1 linear 8 4", "layer 1 linear 8 5"
        )
        with pytest.raises(PolicyError):
            loads_policy(text)

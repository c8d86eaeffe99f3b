"""Feedforward neural policy: weights file, forward pass and output mixing.

The policy is a plain tanh MLP evaluated deterministically (the mean of the
training-time action distribution).  Input is the 6-vector (e, delta-e) in
deg/s; output is one raw value per motor, squashed to [0, 1] by
``transform_output`` before throttle mixing.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

POLICY_INPUT_DIM = 6

_ACTIVATIONS = {
    "tanh": np.tanh,
    "linear": lambda x: x,
}


class PolicyError(Exception):
    """Malformed weights file or dimension mismatch."""


@dataclass(frozen=True)
class MlpPolicy:
    """Weight matrices (out x in), bias vectors and per-layer activations."""

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    activations: tuple[str, ...]

    def __post_init__(self):
        if not (len(self.weights) == len(self.biases) == len(self.activations)):
            raise PolicyError("weights, biases and activations must align")
        for i, (w, b, act) in enumerate(
            zip(self.weights, self.biases, self.activations)
        ):
            if act not in _ACTIVATIONS:
                raise PolicyError(f"layer {i}: unknown activation {act!r}")
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise PolicyError(f"layer {i}: bias shape {b.shape} vs W {w.shape}")
            if i > 0 and w.shape[1] != self.weights[i - 1].shape[0]:
                raise PolicyError(
                    f"layer {i}: input width {w.shape[1]} does not match "
                    f"previous output {self.weights[i - 1].shape[0]}"
                )
        if self.weights[0].shape[1] != POLICY_INPUT_DIM:
            raise PolicyError(
                f"input width must be {POLICY_INPUT_DIM} (error and error "
                f"delta per axis), got {self.weights[0].shape[1]}"
            )

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[0]


def init_policy(hidden: tuple[int, ...], output_dim: int, rng=None) -> MlpPolicy:
    """Small random tanh MLP (hidden layers tanh, output linear)."""
    rng = rng or np.random.default_rng(0)
    sizes = (POLICY_INPUT_DIM,) + tuple(hidden) + (output_dim,)
    weights, biases, acts = [], [], []
    for i in range(len(sizes) - 1):
        fan_in = sizes[i]
        weights.append(rng.normal(0.0, 1.0 / np.sqrt(fan_in), (sizes[i + 1], sizes[i])))
        biases.append(np.zeros(sizes[i + 1]))
        acts.append("tanh" if i < len(sizes) - 2 else "linear")
    return MlpPolicy(tuple(weights), tuple(biases), tuple(acts))


def build_input(e, prev_e) -> np.ndarray:
    """State vector for the policy: [e, e - prev_e], both deg/s."""
    e = np.asarray(e, dtype=float)
    prev_e = np.asarray(prev_e, dtype=float)
    return np.concatenate([e, e - prev_e])


def policy_forward(policy: MlpPolicy, x) -> np.ndarray:
    """Raw network output for input x (no output squashing)."""
    h = np.asarray(x, dtype=float)
    if h.shape != (policy.weights[0].shape[1],):
        raise PolicyError(
            f"input shape {h.shape} does not match policy input "
            f"{policy.weights[0].shape[1]}"
        )
    for w, b, act in zip(policy.weights, policy.biases, policy.activations):
        h = _ACTIVATIONS[act](w @ h + b)
    return h


def transform_output(y_raw) -> np.ndarray:
    """Squash raw outputs to control signals in [0, 1].

    Clip to the action bounds [-1, 1], then affine-map: u = (y + 1) / 2.
    Idempotent on already-clipped inputs.
    """
    y = np.clip(np.asarray(y_raw, dtype=float), -1.0, 1.0)
    return (y + 1.0) / 2.0


def throttle_mix(y, throttle: float):
    """Mix a throttle command into policy outputs.

    The throttle is scaled by the available headroom so no output can
    saturate:  T_hat = T * (1 - max_i y_i),  u_i = T_hat + y_i.
    Returns (T_hat, u).
    """
    y = np.asarray(y, dtype=float)
    t_hat = throttle * (1.0 - y.max())
    return t_hat, t_hat + y


# ---------------------------------------------------------------------------
# Weights file format: plain text, diff-able, layer blocks of the form
#
#   layer <index> <activation> <in> <out>
#   <out> rows of <in> weight values
#   bias row of <out> values
# ---------------------------------------------------------------------------


def save_policy(policy: MlpPolicy, path) -> None:
    Path(path).write_text(dumps_policy(policy), encoding="utf-8")


def dumps_policy(policy: MlpPolicy) -> str:
    lines = [f"mlp {' '.join(str(s) for s in policy.layer_sizes)}"]
    for i, (w, b, act) in enumerate(
        zip(policy.weights, policy.biases, policy.activations)
    ):
        lines.append(f"layer {i} {act} {w.shape[1]} {w.shape[0]}")
        for row in w:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(" ".join(repr(float(v)) for v in b))
    lines.append("")
    return "\n".join(lines)


def load_policy(path) -> MlpPolicy:
    """Load and validate a policy weights file."""
    text = Path(path).read_text(encoding="utf-8")
    return loads_policy(text)


def loads_policy(text: str) -> MlpPolicy:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines or not lines[0].startswith("mlp "):
        raise PolicyError("weights file must start with an 'mlp <sizes>' header")
    try:
        sizes = [int(tok) for tok in lines[0].split()[1:]]
    except ValueError as exc:
        raise PolicyError(f"bad header {lines[0]!r}") from exc
    if len(sizes) < 2:
        raise PolicyError("need at least an input and an output layer")

    weights, biases, acts = [], [], []
    pos = 1
    for i in range(len(sizes) - 1):
        if pos >= len(lines):
            raise PolicyError(f"missing layer {i}")
        head = lines[pos].split()
        if len(head) != 5 or head[0] != "layer":
            raise PolicyError(f"bad layer header {lines[pos]!r}")
        idx, act, d_in, d_out = int(head[1]), head[2], int(head[3]), int(head[4])
        if idx != i:
            raise PolicyError(f"layer index {idx} out of order (expected {i})")
        if (d_in, d_out) != (sizes[i], sizes[i + 1]):
            raise PolicyError(
                f"layer {i}: dims {d_in}x{d_out} disagree with header sizes "
                f"{sizes[i]}x{sizes[i + 1]}"
            )
        pos += 1
        rows = []
        for _ in range(d_out):
            vals = [float(v) for v in lines[pos].split()]
            if len(vals) != d_in:
                raise PolicyError(f"layer {i}: expected {d_in} weights per row")
            rows.append(vals)
            pos += 1
        bias = [float(v) for v in lines[pos].split()]
        if len(bias) != d_out:
            raise PolicyError(f"layer {i}: expected {d_out} bias values")
        pos += 1
        weights.append(np.array(rows))
        biases.append(np.array(bias))
        acts.append(act)
    if pos != len(lines):
        raise PolicyError("trailing content after final layer")
    return MlpPolicy(tuple(weights), tuple(biases), tuple(acts))

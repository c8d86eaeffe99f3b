"""Controller wrappers driven by the episode loop.

A controller owns its own state (integrators, previous error) and maps the
current tracking error in deg/s to per-motor control signals in [0, 1].
``act`` may also return the raw pre-squash output as a second value, which
feeds the saturation penalty of the progress-based reward; controllers
without a raw output return the control signal itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .control import PidGains, PidState, mix, pid_eval
from .policy import MlpPolicy, build_input, policy_forward, throttle_mix, transform_output

# Firmware-style normalization between deg/s-scale PID sums and the [0, 1]
# motor signal range the mixer feeds.
PID_OUTPUT_SCALE = 1e-3


@dataclass(frozen=True)
class ControlFrame:
    """One control evaluation: error in, motor commands out.

    Exposed by controllers as ``last_frame`` for logging and debugging.
    The setpoint is owned by the environment; controllers only see the
    error, so it stays None in frames they produce.
    """

    error: np.ndarray          # deg/s
    delta_error: np.ndarray    # deg/s, vs the previous evaluation
    output: np.ndarray         # controller output y before throttle mixing
    throttle: float
    effective_throttle: float
    u: np.ndarray              # final control signals in [0, 1]
    setpoint: np.ndarray | None = None

    def __post_init__(self):
        if np.any(self.u < 0.0) or np.any(self.u > 1.0):
            raise ValueError(f"control signals out of [0, 1]: {self.u}")
        if self.effective_throttle > self.throttle + 1e-12:
            raise ValueError(
                f"effective throttle {self.effective_throttle} exceeds "
                f"commanded {self.throttle}"
            )


class PidController:
    """Axis-wise PID with motor mixing."""

    def __init__(self, gains: PidGains, mixer, throttle: float = 0.0,
                 output_scale: float = PID_OUTPUT_SCALE):
        self.gains = gains
        self.mixer = np.asarray(mixer, dtype=float)
        self.throttle = throttle
        self.output_scale = output_scale
        self.state = PidState()
        self.last_frame: ControlFrame | None = None

    def reset(self):
        self.state.reset()
        self.last_frame = None

    def act(self, error_deg, dt: float):
        e = np.asarray(error_deg, dtype=float)
        delta_e = e - self.state.prev_error
        y = pid_eval(self.state, e, self.gains, dt) * self.output_scale
        u = mix(y, self.throttle, self.mixer)
        self.last_frame = ControlFrame(
            error=e, delta_error=delta_e, output=y,
            throttle=self.throttle, effective_throttle=self.throttle, u=u,
        )
        return u, u


class NeuroController:
    """Feedforward MLP policy with throttle mixing."""

    def __init__(self, policy: MlpPolicy, throttle: float = 0.0):
        self.policy = policy
        self.throttle = throttle
        self.prev_e = np.zeros(3)
        self.last_frame: ControlFrame | None = None

    def reset(self):
        self.prev_e = np.zeros(3)
        self.last_frame = None

    def act(self, error_deg, dt: float):
        e = np.asarray(error_deg, dtype=float)
        x = build_input(e, self.prev_e)
        delta_e = e - self.prev_e
        self.prev_e = e.copy()
        raw = policy_forward(self.policy, x)
        y = transform_output(raw)
        t_hat, u = throttle_mix(y, self.throttle)
        self.last_frame = ControlFrame(
            error=e, delta_error=delta_e, output=y,
            throttle=self.throttle, effective_throttle=t_hat, u=u,
        )
        return u, raw


class ConstantController:
    """Fixed command on every step (u=0 gives the frozen-stick baseline)."""

    def __init__(self, u):
        self.u = np.asarray(u, dtype=float)

    def reset(self):
        pass

    def act(self, error_deg, dt: float):
        return self.u, self.u


class SequenceController:
    """Replays a pre-recorded command sequence row by row."""

    def __init__(self, commands):
        self.commands = np.asarray(commands, dtype=float)
        self.idx = 0

    def reset(self):
        self.idx = 0

    def act(self, error_deg, dt: float):
        if self.idx >= len(self.commands):
            u = self.commands[-1]
        else:
            u = self.commands[self.idx]
        self.idx += 1
        return u, u

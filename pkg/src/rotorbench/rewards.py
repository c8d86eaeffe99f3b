"""The three reward-system generations, as pure functions.

Generation 1 penalizes normalized absolute error (body rates in rad/s).
Generation 2 adds output-minimization and smoothness bonuses gated by an
error band (errors in deg/s).  Generation 3 is the progress-based system
with saturation and idle penalties; it carries a small explicit state
(previous squared-error sum and previous control vector).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RewardParams:
    """Knobs shared by the reward systems.

    omega_max is rad/s and only feeds reward_v1.  output_scale converts
    [0,1] control signals to the unit delta_y_max is expressed in (the
    smoothness bonus was tuned against ~[0,1000]-scale outputs).
    """

    omega_max: float = 5.24
    alpha: float = 300.0
    beta: float = 0.5
    delta_y_max: float = 100.0**2
    epsilon: float = 0.1
    max_penalty: float = 1e9
    output_scale: float = 1000.0

    def __post_init__(self):
        if self.omega_max <= 0 or self.alpha <= 0 or self.beta <= 0:
            raise ValueError("omega_max, alpha and beta must be positive")
        if self.delta_y_max <= 0 or self.max_penalty <= 0:
            raise ValueError("delta_y_max and max_penalty must be positive")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")


@dataclass
class RewardState:
    """Carried between steps by the progress-based reward."""

    prev_error_sum: float = 0.0  # r_{e,t-1}, a non-positive squared-error sum
    prev_u: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def reset(self, motor_count: int = 4):
        self.prev_error_sum = 0.0
        self.prev_u = np.zeros(motor_count)


def reward_v1(e, omega_max: float) -> float:
    """Normalized absolute-error penalty in [-1, 0]; e in rad/s."""
    if omega_max <= 0:
        raise ValueError(f"omega_max must be positive, got {omega_max}")
    total = np.abs(np.asarray(e, dtype=float)).sum()
    return -float(np.clip(total / (3.0 * omega_max), 0.0, 1.0))


def reward_error(e) -> float:
    """Negative sum of squared per-axis errors (deg/s)."""
    e = np.asarray(e, dtype=float)
    return -float(np.dot(e, e))


def reward_output_min(y, alpha: float) -> float:
    """Bonus for low average output: alpha * (1 - mean(y)), y in [0,1]^M."""
    return alpha * (1.0 - float(np.mean(y)))


def reward_smooth(delta_y, beta: float, delta_y_max: float) -> float:
    """Bonus for small output changes.

    beta * sum_i max(0, delta_y_max - delta_y_i^2); changes beyond the
    allowance earn nothing rather than a penalty.
    """
    dy = np.asarray(delta_y, dtype=float)
    return beta * float(np.maximum(0.0, delta_y_max - dy * dy).sum())


def in_error_band(e, setpoint, epsilon: float) -> bool:
    """Band test |e| < eps*|setpoint| on every axis.

    Strict on purpose: an axis with a zero setpoint can never be in band,
    so the output bonuses only pay out while actively tracking a command.
    """
    e = np.abs(np.asarray(e, dtype=float))
    sp = np.abs(np.asarray(setpoint, dtype=float))
    return bool(np.all(e < epsilon * sp))


def reward_v2(e, y, delta_y, in_band: bool, params: RewardParams) -> float:
    """Error penalty plus band-gated output and smoothness bonuses."""
    r = reward_error(e)
    if in_band:
        r += reward_output_min(y, params.alpha)
        r += reward_smooth(delta_y, params.beta, params.delta_y_max)
    return r


def reward_v3(
    state: RewardState,
    e,
    u,
    a_raw,
    setpoint,
    params: RewardParams,
) -> tuple[float, RewardState]:
    """Progress-based reward with stabilizing penalties.

    Per step:
      * progress term r_{e,t} - r_{e,t-1} with r_e = -sum(e^2);
      * minus beta * max_i |u_t - u_{t-1}|;
      * inside the error band the reward is replaced by alpha * (1 - mean u)
        (the in-band branch overwrites the accumulated terms);
      * minus max_penalty * sum_i max(a_i - 1, 0) for raw-output saturation
        (only the high side is penalized);
      * minus max_penalty if every u_i == 1;
      * minus max_penalty if more than two motors are idle while any
        setpoint component is nonzero.

    Returns the reward and the successor state.
    """
    e = np.asarray(e, dtype=float)
    u = np.asarray(u, dtype=float)
    a_raw = np.asarray(a_raw, dtype=float)
    sp = np.asarray(setpoint, dtype=float)

    r_e_t = reward_error(e)
    r = r_e_t - state.prev_error_sum
    r -= params.beta * float(np.abs(u - state.prev_u).max())
    if in_error_band(e, sp, params.epsilon):
        r = reward_output_min(u, params.alpha)
    r -= params.max_penalty * float(np.maximum(a_raw - 1.0, 0.0).sum())
    if np.all(u == 1.0):
        r -= params.max_penalty
    zero_motors = int(np.count_nonzero(u == 0.0))
    if zero_motors > 2 and np.any(np.abs(sp) > 0.0):
        r -= params.max_penalty
    return float(r), RewardState(prev_error_sum=r_e_t, prev_u=u.copy())

"""Per-rotor propulsion model.

Covers the chain control signal -> target rotor speed (throttle curve) ->
rate-limited speed response (clamped PID on the rotor velocity) -> thrust and
torque, plus the dimensionless coefficient algebra used to derive the static
thrust/torque constants from bench measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .units import rpm_to_rads

# The response PID was identified at a 1 kHz update rate; per-step velocity
# increment clamps are expressed at this reference step.
DT_REF = 1e-3


@dataclass
class MotorParams:
    """Static description of one motor/propeller unit.

    kt is N/(rad/s)^2, kq is m (torque per newton of thrust).  h_coeffs map
    a control signal u in [0,1] to a target speed in RPM, highest degree
    first.  f_min/f_max clamp the per-step speed increment (RPM per
    reference step) and response_scale converts the PID output into that
    increment.
    """

    kt: float
    kq: float
    h_coeffs: tuple[float, ...]
    kp: float = 1e-4
    ki: float = 0.0
    kd: float = 0.0
    f_min: float = -1.0
    f_max: float = 1.0
    response_scale: float = 1.0
    omega_max: float = 30000.0  # RPM
    spin_dir: int = 1

    def __post_init__(self):
        if self.kt <= 0:
            raise ValueError(f"kt must be positive, got {self.kt}")
        if self.kq <= 0:
            raise ValueError(f"kq must be positive, got {self.kq}")
        if not (self.f_min < 0.0 < self.f_max):
            raise ValueError(
                f"require f_min < 0 < f_max, got ({self.f_min}, {self.f_max})"
            )
        if self.omega_max <= 0:
            raise ValueError(f"omega_max must be positive, got {self.omega_max}")
        if self.spin_dir not in (-1, 1):
            raise ValueError(f"spin_dir must be +1 or -1, got {self.spin_dir}")


@dataclass
class MotorState:
    """Mutable per-rotor state: current speed (RPM) and PID memory."""

    omega: float = 0.0
    integral: float = 0.0
    prev_error: float = 0.0

    def reset(self):
        self.omega = 0.0
        self.integral = 0.0
        self.prev_error = 0.0


def throttle_to_target(u: float, h_coeffs) -> float:
    """Evaluate the throttle curve H(u), floored at zero RPM.

    Out-of-range commands are clamped to [0,1]; callers that care about
    clamping keep their own counters.
    """
    u = min(max(u, 0.0), 1.0)
    rpm = 0.0
    for c in h_coeffs:
        rpm = rpm * u + c
    return max(rpm, 0.0)


def motor_response_step(
    state: MotorState, target: float, p: MotorParams, dt: float
) -> MotorState:
    """Advance the rotor speed one step toward ``target`` RPM.

    Positive error (target above current speed) accelerates the rotor.  The
    PID output, scaled by response_scale, is clamped to [f_min, f_max] so
    acceleration and deceleration slopes stay independently bounded; the
    clamped increment scales linearly with dt relative to the 1 ms
    identification step.  Speed never goes negative.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    e = target - state.omega
    integral = state.integral + e * dt
    de = (e - state.prev_error) / dt
    raw = p.kp * e + p.ki * integral + p.kd * de
    inc = min(max(raw * p.response_scale, p.f_min), p.f_max) * (dt / DT_REF)
    return MotorState(
        omega=max(state.omega + inc, 0.0),
        integral=integral,
        prev_error=e,
    )


def thrust(omega: float, kt: float) -> float:
    """Thrust in newtons for a rotor speed in rad/s: T = omega^2 * kt."""
    if omega < 0:
        raise ValueError(f"rotor speed must be non-negative, got {omega}")
    return omega * omega * kt


def torque(t: float, kq: float) -> float:
    """Reaction torque magnitude in N*m as a function of thrust: Q = T * kq."""
    if t < 0:
        raise ValueError(f"thrust must be non-negative, got {t}")
    return t * kq


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if value <= 0:
            raise ValueError(f"{name} must be positive, got {value}")


def ct(t: float, rho: float, n: float, d: float) -> float:
    """Thrust coefficient C_T = T / (rho * n^2 * D^4); n in rev/s, D in m."""
    _require_positive(rho=rho, n=n, d=d)
    return t / (rho * n * n * d**4)


def cq(q: float, rho: float, n: float, d: float) -> float:
    """Torque coefficient C_Q = Q / (rho * n^2 * D^5)."""
    _require_positive(rho=rho, n=n, d=d)
    return q / (rho * n * n * d**5)


def advance_ratio(v: float, n: float, d: float) -> float:
    """Advance ratio J = V / (n * D); J = 0 is the static bench case."""
    _require_positive(n=n, d=d)
    return v / (n * d)


def kt_from_ct(c_t: float, rho: float, d: float) -> float:
    """Static thrust constant K_T = C_T * rho * D^4 / (2*pi)^2."""
    _require_positive(c_t=c_t, rho=rho, d=d)
    return c_t * rho * d**4 / (2.0 * math.pi) ** 2


def kq_from_coeffs(c_t: float, c_q: float, d: float) -> float:
    """Torque-per-thrust constant K_Q = C_Q * D / C_T."""
    _require_positive(c_t=c_t, c_q=c_q, d=d)
    return c_q * d / c_t


def rotor_thrusts(omegas_rpm: np.ndarray, motors) -> np.ndarray:
    """Vector of per-rotor thrusts (N) from speeds in RPM."""
    return np.array(
        [thrust(rpm_to_rads(w), m.kt) for w, m in zip(omegas_rpm, motors)]
    )


def rotor_torques(thrusts: np.ndarray, motors) -> np.ndarray:
    """Vector of per-rotor reaction torque magnitudes (N*m)."""
    return np.array([torque(t, m.kq) for t, m in zip(thrusts, motors)])

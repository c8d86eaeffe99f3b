"""Axis-wise PID control, motor mixing and Ziegler-Nichols tuning."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class TuningError(Exception):
    """Ultimate-gain search failed to provoke a sustained oscillation."""


# Tuned [Kp, Ki, Kd] rows (roll, pitch, yaw) shipped with the aircraft
# presets; firmware-style magnitudes, paired with the wrapper's 1e-3 output
# normalization.
PID_GAIN_PRESETS = {
    "iris-ch3": ((2.0, 10.0, 0.005), (10.0, 10.0, 0.005), (4.0, 50.0, 0.0)),
    "nf1-ch5": ((2.4, 33.24, 0.033), (4.2, 64.33, 0.059), (2.0, 5.0, 0.0)),
}


@dataclass(frozen=True)
class PidGains:
    """Per-axis (roll, pitch, yaw) proportional/integral/derivative gains."""

    kp: tuple[float, float, float]
    ki: tuple[float, float, float]
    kd: tuple[float, float, float]

    @staticmethod
    def from_rows(roll, pitch, yaw) -> "PidGains":
        """Build from [kp, ki, kd] triples per axis, firmware style."""
        rows = (roll, pitch, yaw)
        return PidGains(
            kp=tuple(r[0] for r in rows),
            ki=tuple(r[1] for r in rows),
            kd=tuple(r[2] for r in rows),
        )


@dataclass
class PidState:
    """Integral accumulator and previous error per axis."""

    integral: np.ndarray = field(default_factory=lambda: np.zeros(3))
    prev_error: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def reset(self):
        self.integral[:] = 0.0
        self.prev_error[:] = 0.0


def pid_eval(state: PidState, e, gains: PidGains, dt: float) -> np.ndarray:
    """One PID evaluation per axis; mutates state.

    y = Kp*e + Ki*Int(e dt) (rectangle rule) + Kd*(e - e_prev)/dt.
    The derivative acts on the error, matching the textbook form.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    e = np.asarray(e, dtype=float)
    state.integral += e * dt
    de = (e - state.prev_error) / dt
    state.prev_error = e.copy()
    return (
        np.asarray(gains.kp) * e
        + np.asarray(gains.ki) * state.integral
        + np.asarray(gains.kd) * de
    )


def mix(y, throttle: float, mixer, clip: bool = True) -> np.ndarray:
    """Combine axis outputs into per-motor control signals.

    u_i = T + m_(i,roll)*y_roll + m_(i,pitch)*y_pitch + m_(i,yaw)*y_yaw,
    clamped to [0, 1] unless ``clip`` is disabled (useful for inspecting
    pre-saturation values).
    """
    mixer = np.asarray(mixer, dtype=float)
    u = throttle + mixer @ np.asarray(y, dtype=float)
    if clip:
        u = np.clip(u, 0.0, 1.0)
    return u


def zn_tune(k_u: float, t_u: float) -> tuple[float, float, float]:
    """Classic Ziegler-Nichols PID gains for one axis.

    Kp = 0.6 Ku, Ki = 1.2 Ku / Tu, Kd = 0.075 Ku Tu.
    """
    if k_u <= 0 or t_u <= 0:
        raise ValueError(f"K_u and T_u must be positive, got ({k_u}, {t_u})")
    return 0.6 * k_u, 1.2 * k_u / t_u, 0.075 * k_u * t_u


def detect_sustained_oscillation(t, y, cycles: int = 5, decay_tol: float = 0.05):
    """Look for a sustained oscillation in a closed-loop response.

    Returns the measured period if the peak-to-peak amplitude decays less
    than ``decay_tol`` (relative) across the last ``cycles`` cycles, else
    None.  A growing oscillation counts as sustained: the sweep approaches
    the ultimate gain from below, so the first non-decaying response marks
    it.  Peaks are interior local maxima/minima of the response.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    interior = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    maxima = np.where(interior)[0] + 1
    interior_min = (y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:])
    minima = np.where(interior_min)[0] + 1
    if len(maxima) < cycles + 1 or len(minima) < cycles:
        return None
    peaks_t = t[maxima][-(cycles + 1):]
    peaks_y = y[maxima][-(cycles + 1):]
    troughs_y = y[minima][-cycles:]
    n = min(len(peaks_y) - 1, len(troughs_y))
    ptp = peaks_y[-n:] - troughs_y[-n:]
    if np.any(ptp <= 1e-12):
        return None
    decay = 1.0 - ptp[-1] / ptp[0]
    if decay >= decay_tol:
        return None
    periods = np.diff(peaks_t)
    return float(periods.mean())


def ultimate_gain_search(
    plant,
    k_start: float = 0.1,
    k_factor: float = 1.3,
    k_max: float = 1e6,
    osc_detector=detect_sustained_oscillation,
) -> tuple[float, float]:
    """Find the ultimate gain and oscillation period of a P-only loop.

    ``plant(kp)`` must run the closed loop under pure proportional gain and
    return (t, y) arrays.  The gain is swept geometrically from ``k_start``
    until the detector reports a sustained oscillation; returns (K_u, T_u).
    Raises TuningError if the cap is reached without oscillation, e.g. for a
    pure first-order plant.
    """
    if k_start <= 0 or k_factor <= 1:
        raise ValueError("k_start must be positive and k_factor > 1")
    k = k_start
    while k <= k_max:
        t, y = plant(k)
        period = osc_detector(t, y)
        if period is not None:
            return k, period
        k *= k_factor
    raise TuningError(
        f"no sustained oscillation found for gains up to {k_max:g}"
    )

"""Virtual dynamometer: bench experiments against a motor model.

Provides the load-cell calibration math, step and ramp experiments, throttle
curve fitting, static coefficient derivation, model-vs-reference validation
and pulse-train RPM decoding.  A synthetic bench-motor reference generator
stands in for recorded hardware data so the fit/validate pipeline can run
end to end on the desk.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace as dc_replace
from pathlib import Path

import numpy as np

from .motors import (
    MotorParams,
    MotorState,
    cq,
    ct,
    kq_from_coeffs,
    kt_from_ct,
    motor_response_step,
    throttle_to_target,
    thrust,
    torque,
)
from .trace import atomic_write_text
from .units import rpm_to_rads

# Defaults used when deriving coefficients without measured air density or
# propeller diameter (sea-level air, 5.1 inch propeller).
DEFAULT_RHO = 1.225
DEFAULT_DIAMETER = 0.1295


class DynoError(Exception):
    """Bad experiment input or degenerate fit."""


@dataclass(frozen=True)
class DynoTrace:
    """Uniform time series of one bench run."""

    t: np.ndarray
    u: np.ndarray
    rpm: np.ndarray
    thrust: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for name in ("u", "rpm", "thrust", "torque"):
            if len(getattr(self, name)) != n:
                raise DynoError(f"column {name} length != {n}")
        if np.any(self.rpm < 0):
            raise DynoError("negative RPM in trace")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def to_csv_text(self) -> str:
        out = io.StringIO()
        out.write("t,u,rpm,thrust,torque\n")
        for i in range(len(self.t)):
            row = (self.t[i], self.u[i], self.rpm[i], self.thrust[i], self.torque[i])
            out.write(",".join(repr(float(v)) for v in row))
            out.write("\n")
        return out.getvalue()

    def write_csv(self, path) -> None:
        atomic_write_text(path, self.to_csv_text())


def read_dyno_csv(path) -> DynoTrace:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != "t,u,rpm,thrust,torque":
        raise DynoError(f"{path}: expected header 't,u,rpm,thrust,torque'")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:] if ln])
    if data.size == 0:
        raise DynoError(f"{path}: empty trace")
    return DynoTrace(data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4])


# ---------------------------------------------------------------------------
# Load-cell math
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoadCellCal:
    """Calibration constants: two torque cells and one thrust cell."""

    k_tau1: float
    k_tau2: float
    k_thrust: float

    def __post_init__(self):
        if 0.0 in (self.k_tau1, self.k_tau2, self.k_thrust):
            raise DynoError("calibration constants must be nonzero")


def torque_from_cells(ls1: float, ls2: float, cal: LoadCellCal) -> float:
    """Torque from the two opposed load sensors: (|k1*LS1| + |k2*LS2|) / 2.

    One cell is pushed and the other pulled, so magnitudes are averaged.
    """
    return (abs(cal.k_tau1 * ls1) + abs(cal.k_tau2 * ls2)) / 2.0


def thrust_from_cell(ls: float, cal: LoadCellCal) -> float:
    """Thrust magnitude |k_T * LS| (supports push and pull propellers)."""
    return abs(cal.k_thrust * ls)


def calibrate_linear(points, hysteresis_tol: float = 0.02):
    """Least-squares line through (applied, reading) calibration points.

    Returns (slope, intercept, residuals, hysteresis_flag).  The regression
    direction is fixed: reading on applied.  Points may carry an optional
    third field 'load'/'unload'; the hysteresis flag is set when paired
    load/unload readings at the same applied value differ by more than
    ``hysteresis_tol`` relative to the reading span.
    """
    rows = list(points)
    if len(rows) < 2:
        raise DynoError(f"need >= 2 calibration points, got {len(rows)}")
    applied = np.array([float(r[0]) for r in rows])
    reading = np.array([float(r[1]) for r in rows])
    if np.allclose(applied, applied[0]):
        raise DynoError("degenerate calibration: all applied values equal")
    slope, intercept = np.polyfit(applied, reading, 1)
    residuals = reading - (slope * applied + intercept)

    hysteresis = False
    phases = [r[2] if len(r) > 2 else None for r in rows]
    if any(p is not None for p in phases):
        span = reading.max() - reading.min()
        by_value: dict[float, dict] = {}
        for a, r, p in zip(applied, reading, phases):
            by_value.setdefault(float(a), {})[p] = r
        for readings in by_value.values():
            if "load" in readings and "unload" in readings and span > 0:
                if abs(readings["load"] - readings["unload"]) / span > hysteresis_tol:
                    hysteresis = True
    return float(slope), float(intercept), residuals, hysteresis


def read_calibration_csv(path):
    """Read applied,reading[,phase] rows for calibrate_linear."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("applied,reading"):
        raise DynoError(f"{path}: expected header 'applied,reading[,phase]'")
    rows = []
    for ln in lines[1:]:
        if not ln.strip():
            continue
        parts = ln.split(",")
        rows.append(
            (float(parts[0]), float(parts[1]), parts[2].strip() if len(parts) > 2 else None)
        )
    return rows


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

STEP_LEVELS = (0.25, 0.5, 0.75, 1.0)


def _run_motor(motor: MotorParams, u_series: np.ndarray, dt: float) -> DynoTrace:
    state = MotorState()
    n = len(u_series)
    rpm = np.empty(n)
    thr = np.empty(n)
    tq = np.empty(n)
    for i, u in enumerate(u_series):
        target = throttle_to_target(float(u), motor.h_coeffs)
        state = motor_response_step(state, target, motor, dt)
        rpm[i] = state.omega
        thr[i] = thrust(rpm_to_rads(state.omega), motor.kt)
        tq[i] = torque(thr[i], motor.kq)
    t = (np.arange(n) + 1) * dt
    return DynoTrace(t=t, u=u_series.astype(float), rpm=rpm, thrust=thr, torque=tq)


def step_experiment(
    motor: MotorParams,
    levels=STEP_LEVELS,
    on_time: float = 1.0,
    off_time: float = 1.0,
    dt: float = 1e-3,
) -> list[DynoTrace]:
    """Fixed-throttle steps: hold each level, then idle, starting from rest."""
    traces = []
    n_on = int(round(on_time / dt))
    n_off = int(round(off_time / dt))
    for level in levels:
        u = np.concatenate([np.full(n_on, level), np.zeros(n_off)])
        traces.append(_run_motor(motor, u, dt))
    return traces


def ramp_experiment(
    motor: MotorParams, ramp_time: float = 20.0, dt: float = 1e-3
) -> DynoTrace:
    """Triangular throttle sweep 0 -> 1 -> 0 over 2 * ramp_time seconds."""
    n = int(round(ramp_time / dt))
    up = np.arange(1, n + 1) / n
    down = np.arange(n - 1, -1, -1) / n
    return _run_motor(motor, np.concatenate([up, down]), dt)


def plateau_rpm(trace: DynoTrace, window_frac: float = 0.25) -> float:
    """Steady RPM of a step trace: mean of the last quarter of the on-segment."""
    on = np.where(trace.u > 0)[0]
    if len(on) == 0:
        raise DynoError("trace has no on-segment")
    end = on[-1] + 1
    start = end - max(1, int(len(on) * window_frac))
    return float(trace.rpm[start:end].mean())


def fit_throttle_curve(points, degree: int = 2) -> np.ndarray:
    """Least-squares polynomial through (u, steady RPM) points.

    Coefficients come back highest degree first, ready for the motor
    config's h_coeffs field.
    """
    pts = list(points)
    if len(pts) < degree + 1:
        raise DynoError(
            f"need >= {degree + 1} points for degree {degree}, got {len(pts)}"
        )
    u = np.array([p[0] for p in pts], dtype=float)
    rpm = np.array([p[1] for p in pts], dtype=float)
    return np.polyfit(u, rpm, degree)


def derive_constants(
    max_thrust: float,
    max_torque: float,
    omega_max_rpm: float,
    rho: float = DEFAULT_RHO,
    diameter: float = DEFAULT_DIAMETER,
) -> dict:
    """Static coefficients and motor constants from bench maxima.

    C_T and C_Q are evaluated at n = omega_max/60 rev/s; K_T and K_Q follow
    from the coefficient relations, so thrust(omega_max) reproduces
    max_thrust by construction.
    """
    if min(max_thrust, max_torque, omega_max_rpm, rho, diameter) <= 0:
        raise DynoError("all inputs must be positive")
    n = omega_max_rpm / 60.0
    c_t = ct(max_thrust, rho, n, diameter)
    c_q = cq(max_torque, rho, n, diameter)
    return {
        "c_t": c_t,
        "c_q": c_q,
        "kt": kt_from_ct(c_t, rho, diameter),
        "kq": kq_from_coeffs(c_t, c_q, diameter),
        "rho": rho,
        "diameter": diameter,
    }


def validate_model(
    sim: DynoTrace, reference: DynoTrace, omega_max_rpm: float | None = None
) -> dict:
    """Per-channel MAE between a simulated and a reference trace.

    Traces are resampled onto the overlap of their time ranges.  The RPM
    error is also reported as a percentage of ``omega_max_rpm`` (defaults
    to the reference maximum).
    """
    if len(sim.t) == 0 or len(reference.t) == 0:
        raise DynoError("empty trace")
    t0 = max(sim.t[0], reference.t[0])
    t1 = min(sim.t[-1], reference.t[-1])
    if t1 <= t0:
        raise DynoError("traces do not overlap in time")
    grid = np.linspace(t0, t1, min(len(sim.t), len(reference.t)))
    result = {}
    for channel in ("rpm", "thrust", "torque"):
        a = np.interp(grid, sim.t, getattr(sim, channel))
        b = np.interp(grid, reference.t, getattr(reference, channel))
        result[f"{channel}_mae"] = float(np.abs(a - b).mean())
    if omega_max_rpm is None:
        omega_max_rpm = float(reference.rpm.max())
    result["rpm_pct"] = result["rpm_mae"] / omega_max_rpm * 100.0
    return result


def rpm_from_pulses(t, voltage, blade_count: int = 3, threshold: float = 0.5):
    """Decode an optical pulse train into RPM samples.

    Each blade passage produces one rising edge above ``threshold``; every
    ``blade_count`` edges close one rotation, and the RPM comes from the
    time between rotation boundaries.  Returns (times, rpm) arrays, one
    entry per completed rotation.
    """
    if blade_count < 1:
        raise DynoError(f"blade_count must be >= 1, got {blade_count}")
    t = np.asarray(t, dtype=float)
    v = np.asarray(voltage, dtype=float)
    above = v >= threshold
    edges = np.where(above[1:] & ~above[:-1])[0] + 1
    if len(edges) == 0:
        raise DynoError("no pulse edges found above threshold")
    rotation_edges = edges[::blade_count]
    if len(rotation_edges) < 2:
        raise DynoError(
            f"need at least {blade_count + 1} pulses for one full rotation"
        )
    times = t[rotation_edges][1:]
    intervals = np.diff(t[rotation_edges])
    return times, 60.0 / intervals


# ---------------------------------------------------------------------------
# Bench reference and response fitting
# ---------------------------------------------------------------------------

# Two-time-scale bench response: the rotor covers most of a speed change
# quickly and creeps through the rest, slower when spinning down (prop drag
# alone brakes it).  These constants define the synthetic "measured" motor
# the shipped response parameters were fitted against.
REF_FAST_TAU_UP = 0.030
REF_SLOW_TAU_UP = 0.120
REF_FAST_TAU_DOWN = 0.045
REF_SLOW_TAU_DOWN = 0.180
REF_FAST_WEIGHT = 0.8


def reference_step_trace(
    level: float,
    h_coeffs,
    kt: float = 9.37e-7,
    kq: float = 8.64e-3,
    on_time: float = 1.0,
    off_time: float = 1.0,
    dt: float = 1e-3,
) -> DynoTrace:
    """Synthetic bench measurement of one throttle step.

    Emulates a recorded step response with a fast/slow double-exponential
    toward H(u), asymmetric between spin-up and spin-down.  Serves as the
    ground truth for fitting and validating the clamped-PID motor response.
    """
    n_on = int(round(on_time / dt))
    n_off = int(round(off_time / dt))
    u_series = np.concatenate([np.full(n_on, level), np.zeros(n_off)])
    s_fast = 0.0
    s_slow = 0.0
    rpm = np.empty(len(u_series))
    for i, u in enumerate(u_series):
        target = throttle_to_target(float(u), h_coeffs)
        tau_f = REF_FAST_TAU_UP if target >= s_fast else REF_FAST_TAU_DOWN
        tau_s = REF_SLOW_TAU_UP if target >= s_slow else REF_SLOW_TAU_DOWN
        s_fast += (1.0 - math.exp(-dt / tau_f)) * (target - s_fast)
        s_slow += (1.0 - math.exp(-dt / tau_s)) * (target - s_slow)
        rpm[i] = max(REF_FAST_WEIGHT * s_fast + (1.0 - REF_FAST_WEIGHT) * s_slow, 0.0)
    thr = np.array([thrust(rpm_to_rads(w), kt) for w in rpm])
    tq = np.array([torque(x, kq) for x in thr])
    t = (np.arange(len(u_series)) + 1) * dt
    return DynoTrace(t=t, u=u_series.astype(float), rpm=rpm, thrust=thr, torque=tq)


def _batch_response_mae(kp_eff, f_min, f_max, references, h_coeffs, dt):
    """Worst per-level RPM MAE of P-only response candidates, vectorized.

    Candidates are parallel arrays of effective P gain (kp * response_scale)
    and clamps.  This is the Ki=Kd=0 fast path of motor_response_step,
    duplicated so a grid of thousands of candidates stays cheap; the slow
    path is revalidated against it by the test suite and by the final
    fit result.
    """
    kp_eff = np.asarray(kp_eff, dtype=float)
    worst = np.zeros_like(kp_eff)
    for ref in references.values():
        omega = np.zeros_like(kp_eff)
        acc = np.zeros_like(kp_eff)
        for i, u in enumerate(ref.u):
            target = throttle_to_target(float(u), h_coeffs)
            inc = np.clip(kp_eff * (target - omega), f_min, f_max)
            omega = np.maximum(omega + inc, 0.0)
            acc += np.abs(omega - ref.rpm[i])
        worst = np.maximum(worst, acc / len(ref.u))
    return worst


def fit_motor_response(
    motor: MotorParams,
    references: dict[float, DynoTrace] | None = None,
    scales=None,
    f_maxes=None,
    f_mins=None,
    dt: float = 1e-3,
) -> tuple[MotorParams, float]:
    """Tune response_scale and the increment clamps against reference steps.

    Joint grid search over the P-term scale and the acceleration clamp,
    then the deceleration clamp, minimizing the worst per-level RPM percent
    error.  Returns the fitted MotorParams and that error, measured with the
    real (non-vectorized) motor model.
    """
    if references is None:
        references = {
            lvl: reference_step_trace(lvl, motor.h_coeffs, motor.kt, motor.kq, dt=dt)
            for lvl in STEP_LEVELS
        }
    omega_max = motor.omega_max
    scales = np.asarray(scales if scales is not None else np.geomspace(50.0, 5000.0, 40))
    f_maxes = np.asarray(
        f_maxes if f_maxes is not None else np.append(np.geomspace(50.0, 3000.0, 25), 1e9)
    )
    f_mins = np.asarray(
        f_mins if f_mins is not None else -np.append(np.geomspace(50.0, 3000.0, 25), 1e9)
    )

    # Stage 1: (scale, f_max) jointly, deceleration unclamped.
    grid_s, grid_f = np.meshgrid(scales, f_maxes, indexing="ij")
    grid_s = grid_s.ravel()
    grid_f = grid_f.ravel()
    err = _batch_response_mae(
        motor.kp * grid_s, -1e18, grid_f, references, motor.h_coeffs, dt
    )
    k = int(np.argmin(err))
    scale, f_max = float(grid_s[k]), float(grid_f[k])

    # Stage 2: f_min given the stage-1 winner.
    err = _batch_response_mae(
        np.full_like(f_mins, motor.kp * scale), f_mins, f_max,
        references, motor.h_coeffs, dt,
    )
    f_min = float(f_mins[int(np.argmin(err))])

    fitted = dc_replace(motor, response_scale=scale, f_min=f_min, f_max=f_max)
    errors = []
    for level, ref in references.items():
        on = float(np.sum(ref.u > 0)) * dt
        off = float(np.sum(ref.u == 0)) * dt
        sim = step_experiment(fitted, levels=[level], on_time=on, off_time=off, dt=dt)[0]
        errors.append(validate_model(sim, ref, omega_max_rpm=omega_max)["rpm_pct"])
    return fitted, max(errors)

"""Quantitative evaluation of episode traces.

Step-response metrics (success, failure, rise, peak, error, stability
slope) are computed per axis over the first command-change window of a
trace.  The integral error suite (MAE/MSE/IAE/ISE/ITAE/ITSE) uses the
discrete forms with time weights in milliseconds from episode start.  No
plotting happens here; the CLI renders figures from the emitted data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AXES = ("roll", "pitch", "yaw")
ERROR_METRIC_NAMES = ("mae", "mse", "iae", "ise", "itae", "itse")


@dataclass(frozen=True)
class StepMetrics:
    """Per-axis step-response summary; None marks undefined (no command)."""

    axis: str
    success: bool | None
    failure_pct: float | None
    rise_ms: float | None
    peak_pct: float | None
    mean_abs_error: float
    stability_slope: float | None


@dataclass(frozen=True)
class StepWindow:
    """First command change of a trace and the samples that respond to it."""

    change_idx: int       # first sample at/after the new command
    end_idx: int          # exclusive: next command change or trace end
    rest_omega: np.ndarray  # rates at the sample immediately before the change
    setpoint: np.ndarray


def step_window(trace) -> StepWindow:
    """Locate the first command change.

    The initial error is measured against the sample immediately before the
    change; when the command is active from the very first sample the
    episode started from rest and the rest rates are zero.
    """
    sp = trace.setpoint
    changes = np.where(np.any(sp[1:] != sp[:-1], axis=1))[0] + 1
    if len(changes) == 0:
        start = 0
        rest = np.zeros(3)
        end = len(trace.t)
    else:
        start = int(changes[0])
        rest = trace.gyro[start - 1].copy()
        later = changes[changes > start]
        end = int(later[0]) if len(later) else len(trace.t)
    return StepWindow(
        change_idx=start,
        end_idx=end,
        rest_omega=rest,
        setpoint=sp[start].copy(),
    )


def _progress(trace, axis: int, window: StepWindow):
    """Fraction of the initial error corrected, per in-window sample."""
    initial_error = window.setpoint[axis] - window.rest_omega[axis]
    if initial_error == 0.0:
        return None, None
    omega = trace.gyro[window.change_idx : window.end_idx, axis]
    return (omega - window.rest_omega[axis]) / initial_error, initial_error


def rise_time(trace, axis: int, window: StepWindow | None = None) -> float | None:
    """Time (ms) from 10% to 90% of the initial error correction.

    None when the command was zero-change or 90% is never reached.
    """
    window = window or step_window(trace)
    progress, _ = _progress(trace, axis, window)
    if progress is None:
        return None
    hi = np.where(progress >= 0.9)[0]
    if len(hi) == 0:
        return None
    lo = np.where(progress >= 0.1)[0]
    t = trace.t[window.change_idx : window.end_idx]
    return float((t[hi[0]] - t[lo[0]]) * 1000.0)


def peak(trace, axis: int, window: StepWindow | None = None) -> float | None:
    """Max achieved correction as a percentage; >100 means overshoot."""
    window = window or step_window(trace)
    progress, _ = _progress(trace, axis, window)
    if progress is None:
        return None
    return float(max(progress.max(), 0.0) * 100.0)


def success_failure(
    trace,
    axis: int,
    band: float = 0.1,
    settle_after: float = 0.5,
    window: StepWindow | None = None,
):
    """Settling verdict for one axis.

    Success means every sample later than ``settle_after`` seconds past the
    command change stays within ``band`` of the initial error around the
    setpoint.  On failure the second element is the mean percent error over
    that tail; on success it is 0.0.
    """
    window = window or step_window(trace)
    _, initial_error = _progress(trace, axis, window)
    if initial_error is None:
        return None, None
    t = trace.t[window.change_idx : window.end_idx]
    omega = trace.gyro[window.change_idx : window.end_idx, axis]
    t_change = trace.t[window.change_idx]
    tail = t - t_change >= settle_after
    if not np.any(tail):
        raise ValueError(
            f"window shorter than settle_after={settle_after}s on axis {axis}"
        )
    err_pct = np.abs(omega[tail] - window.setpoint[axis]) / abs(initial_error) * 100.0
    if np.all(err_pct <= band * 100.0):
        return True, 0.0
    return False, float(err_pct.mean())


def stability_slope(
    trace, axis: int, from_t: float = 0.5, window: StepWindow | None = None
) -> float | None:
    """OLS slope of the rate tail ((deg/s)/s); nonzero means still moving."""
    window = window or step_window(trace)
    t = trace.t[window.change_idx : window.end_idx]
    omega = trace.gyro[window.change_idx : window.end_idx, axis]
    t_change = trace.t[window.change_idx]
    tail = t - t_change >= from_t
    if np.count_nonzero(tail) < 2:
        raise ValueError(f"need >= 2 samples after the cut on axis {axis}")
    coeffs = np.polyfit(t[tail], omega[tail], 1)
    return float(coeffs[0])


def compute_step_metrics(
    trace, band: float = 0.1, settle_after: float = 0.5
) -> list[StepMetrics]:
    """Full per-axis step-response summary for a trace."""
    window = step_window(trace)
    out = []
    err = trace.error()[window.change_idx : window.end_idx]
    for axis, name in enumerate(AXES):
        success, failure = success_failure(
            trace, axis, band=band, settle_after=settle_after, window=window
        )
        out.append(
            StepMetrics(
                axis=name,
                success=success,
                failure_pct=failure,
                rise_ms=rise_time(trace, axis, window=window),
                peak_pct=peak(trace, axis, window=window),
                mean_abs_error=float(np.abs(err[:, axis]).mean()),
                stability_slope=stability_slope(
                    trace, axis, from_t=settle_after, window=window
                ),
            )
        )
    return out


def error_metrics(trace) -> dict:
    """Discrete error metrics per axis plus the cross-axis average.

    MAE and MSE are means of |e| and e^2; IAE/ISE are the plain sums; the
    time-weighted ITAE/ITSE weight each sample by its time in milliseconds
    from episode start (weights reconstructed from the sample index so the
    first sample carries weight 0 exactly).
    """
    e = trace.error()
    n = len(trace.t)
    if n == 0:
        raise ValueError("empty trace")
    if n >= 2:
        dt = trace.dt
        k = np.rint((trace.t - trace.t[0]) / dt)
        t_ms = k * (1000.0 * dt)
    else:
        t_ms = np.zeros(1)
    result = {}
    for axis, name in enumerate(AXES):
        ea = np.abs(e[:, axis])
        es = e[:, axis] ** 2
        result[name] = {
            "mae": float(ea.mean()),
            "mse": float(es.mean()),
            "iae": float(ea.sum()),
            "ise": float(es.sum()),
            "itae": float((t_ms * ea).sum()),
            "itse": float((t_ms * es).sum()),
        }
    result["average"] = {
        metric: float(np.mean([result[name][metric] for name in AXES]))
        for metric in ERROR_METRIC_NAMES
    }
    return result


@dataclass(frozen=True)
class EnvelopePoint:
    """One flight-envelope trial: setpoint (deg/s), MAE, settled-in-band."""

    setpoint: tuple[float, float, float]
    mae: float
    in_band: bool


def envelope_scan(
    env_factory,
    controller,
    n: int = 1000,
    sigma: float = 300.0,
    seed: int = 0,
    band: float = 0.1,
    settle_after: float = 0.5,
) -> list[EnvelopePoint]:
    """Scan the flight envelope with random step commands.

    Runs ``n`` independent step-task episodes with setpoints drawn from
    Normal(0, sigma) deg/s per axis.  ``env_factory(setpoint, ep_seed)``
    must return an object whose ``run_episode(controller)`` yields an
    EpisodeTrace.  Episode seeds are ``seed + index``, so trials are
    reproducible and order-independent.

    A trial is in band when every axis stays within ``band`` of its
    setpoint magnitude for all samples after ``settle_after`` seconds.
    """
    points = []
    for ep in range(n):
        ep_seed = seed + ep
        sp_rng = np.random.default_rng(ep_seed)
        setpoint = sp_rng.normal(0.0, sigma, size=3)
        env = env_factory(setpoint, ep_seed)
        trace = env.run_episode(controller)
        err = np.abs(trace.error())
        tail = trace.t >= settle_after
        allowed = band * np.abs(setpoint)
        in_band = bool(np.all(err[tail] <= allowed[None, :]))
        points.append(
            EnvelopePoint(
                setpoint=tuple(setpoint),
                mae=float(err.mean()),
                in_band=in_band,
            )
        )
    return points


def band_fraction(points) -> float:
    """Fraction of envelope trials that settled in band."""
    if not points:
        raise ValueError("no envelope points")
    return sum(1 for p in points if p.in_band) / len(points)

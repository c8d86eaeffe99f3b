"""Setpoint schedule generators.

Every schedule is a piecewise-constant, right-continuous function of time
emitting deg/s setpoints, fully determined by its seed.  Queries never
interpolate.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .units import DEG_PER_RAD


@dataclass(frozen=True)
class TaskSchedule:
    """Segments of (start time, setpoint) covering [0, episode_length)."""

    starts: tuple[float, ...]
    setpoints: tuple[tuple[float, float, float], ...]  # deg/s
    episode_length: float
    seed: int | None = None

    def __post_init__(self):
        if len(self.starts) != len(self.setpoints) or not self.starts:
            raise ValueError("starts and setpoints must align and be non-empty")
        if self.starts[0] != 0.0:
            raise ValueError("first segment must start at t=0")
        if any(b <= a for a, b in zip(self.starts, self.starts[1:])):
            raise ValueError("segment starts must be strictly increasing")
        if self.episode_length <= 0:
            raise ValueError("episode_length must be positive")

    def setpoint_at(self, t: float) -> np.ndarray:
        """Setpoint (deg/s) active at time t; constant within segments."""
        idx = bisect.bisect_right(self.starts, t) - 1
        if idx < 0:
            idx = 0
        return np.array(self.setpoints[idx], dtype=float)


def step_task(setpoint_deg, episode_length: float = 1.0) -> TaskSchedule:
    """Single command held from t=0 for the whole episode."""
    sp = tuple(float(v) for v in setpoint_deg)
    return TaskSchedule(starts=(0.0,), setpoints=(sp,), episode_length=episode_length)


def episodic_uniform(
    seed: int, omega_bound: float = 5.24, episode_length: float = 1.0
) -> TaskSchedule:
    """One uniform random command per axis, held for the episode.

    ``omega_bound`` is rad/s (the classic +-5.24 rad/s envelope); the
    emitted setpoints are deg/s like every schedule.
    """
    if omega_bound <= 0:
        raise ValueError(f"omega_bound must be positive, got {omega_bound}")
    rng = np.random.default_rng(seed)
    sp_rad = rng.uniform(-omega_bound, omega_bound, size=3)
    return TaskSchedule(
        starts=(0.0,),
        setpoints=(tuple(sp_rad * DEG_PER_RAD),),
        episode_length=episode_length,
        seed=seed,
    )


def continuous_random(
    seed: int,
    omega_bound: float = 5.24,
    interval_range: tuple[float, float] = (0.1, 1.0),
    episode_length: float = 30.0,
) -> TaskSchedule:
    """Stream of random commands held for random durations.

    Hold durations are uniform in ``interval_range`` seconds; commands are
    uniform in +-omega_bound rad/s per axis.
    """
    lo, hi = interval_range
    if not (0 < lo < hi):
        raise ValueError(f"invalid interval range {interval_range}")
    rng = np.random.default_rng(seed)
    starts, setpoints = [], []
    t = 0.0
    while t < episode_length:
        starts.append(t)
        sp_rad = rng.uniform(-omega_bound, omega_bound, size=3)
        setpoints.append(tuple(sp_rad * DEG_PER_RAD))
        t += rng.uniform(lo, hi)
    return TaskSchedule(
        starts=tuple(starts),
        setpoints=tuple(setpoints),
        episode_length=episode_length,
        seed=seed,
    )


def pulse(seed: int, sigma: float = 100.0) -> TaskSchedule:
    """Idle / command / idle pulse teaching both acceleration and return.

    Zero setpoint for 0.5 s, a Normal(0, sigma) deg/s command held for
    2 s, then zero again for 2 s (4.5 s total).  Exactly one pulse per
    episode.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    rng = np.random.default_rng(seed)
    command = tuple(rng.normal(0.0, sigma, size=3))
    return pulse_fixed(command, seed=seed)


def pulse_fixed(command_deg, seed: int | None = None) -> TaskSchedule:
    """Pulse schedule with an explicit command (deg/s)."""
    zero = (0.0, 0.0, 0.0)
    return TaskSchedule(
        starts=(0.0, 0.5, 2.5),
        setpoints=(zero, tuple(float(v) for v in command_deg), zero),
        episode_length=4.5,
        seed=seed,
    )


TASK_FAMILIES = ("episodic", "continuous", "pulse")


def make_task(family: str, seed: int, **kwargs) -> TaskSchedule:
    """Schedule factory keyed by family name (CLI plumbing)."""
    if family == "episodic":
        return episodic_uniform(seed, **kwargs)
    if family == "continuous":
        return continuous_random(seed, **kwargs)
    if family == "pulse":
        return pulse(seed, **kwargs)
    raise ValueError(f"unknown task family {family!r}; choose from {TASK_FAMILIES}")

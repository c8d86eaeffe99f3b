"""Simulation-drift measurement over multi-link pose logs.

The drift metric is the summed absolute change of all pairwise inter-link
distances from their initial values; any nonzero value means bodies have
separated.  The built-in simulator is a single rigid body, so its sweep is
zero by construction; drifting behaviour is reproduced through imported
pose logs or the synthetic drift generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

class PoseLogError(Exception):
    """Malformed or ragged pose log."""


@dataclass(frozen=True)
class PoseLog:
    """Per-step link positions: (T, N, 3) meters plus link names."""

    positions: np.ndarray
    link_names: tuple[str, ...]

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        if p.ndim != 3 or p.shape[2] != 3:
            raise PoseLogError(f"positions must be (T, N, 3), got {p.shape}")
        if p.shape[1] != len(self.link_names):
            raise PoseLogError(
                f"{p.shape[1]} links per step vs {len(self.link_names)} names"
            )
        object.__setattr__(self, "positions", p)


@dataclass(frozen=True)
class StabilityPoint:
    """Drift (m) at the body rates (deg/s) where it was measured."""

    delta: float
    omega_deg: tuple[float, float, float]
    action: tuple[float, ...] = ()
    t: float = 0.0


def distance_matrix(positions) -> np.ndarray:
    """Euclidean distance matrix of one link-position set."""
    v = np.atleast_2d(np.asarray(positions, dtype=float))
    diff = v[:, None, :] - v[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def delta(d_t, d_0) -> float:
    """Drift metric: sum of |D(t)_ij - D(0)_ij| over the full matrix.

    The double sum runs over the whole (symmetric) matrix, so every
    unordered pair is counted twice; divide by two for per-pair drift.
    """
    d_t = np.asarray(d_t, dtype=float)
    d_0 = np.asarray(d_0, dtype=float)
    if d_t.shape != d_0.shape:
        raise ValueError(f"shape mismatch: {d_t.shape} vs {d_0.shape}")
    return float(np.abs(d_t - d_0).sum())


def permutation_actions(motor_count: int) -> list[np.ndarray]:
    """All 2^M on/off control vectors in lexicographic order."""
    if motor_count > 16:
        raise ValueError(f"refusing 2^{motor_count} actions (M > 16)")
    actions = []
    for code in range(2**motor_count):
        bits = [(code >> (motor_count - 1 - j)) & 1 for j in range(motor_count)]
        actions.append(np.array(bits, dtype=float))
    return actions


def delta_series(log: PoseLog) -> np.ndarray:
    """Drift metric of every step of a pose log against its first step."""
    d0 = distance_matrix(log.positions[0])
    return np.array([delta(distance_matrix(v), d0) for v in log.positions])


def rigid_link_layout(cfg) -> np.ndarray:
    """Body-frame link positions derived from the config geometry.

    One link per motor on the X arms plus the center body; rigidly
    attached, so pairwise distances never change regardless of rotation.
    """
    arm = cfg.arm_length
    c = arm / np.sqrt(2.0)
    layout = [[0.0, 0.0, 0.0]]
    signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    for i in range(cfg.motor_count):
        sx, sy = signs[i % 4]
        tier = 1.0 + i // 4
        layout.append([sx * c * tier, sy * c * tier, 0.0])
    return np.array(layout)


def stability_sweep(env, pose_source=None, episode_length: float = 2.0):
    """Run every motor permutation, recording (drift, body rates) per step.

    ``pose_source(env) -> (N, 3) positions`` defaults to the rigid layout
    from the environment's config.  Episode length per action defaults to
    2 s at the config step size.
    """
    if pose_source is None:
        layout = rigid_link_layout(env.cfg)
        pose_source = lambda _env: layout  # noqa: E731
    points = []
    steps = int(round(episode_length / env.cfg.sim_dt))
    for action in permutation_actions(env.cfg.motor_count):
        env.reset()
        if env.total_steps < steps:
            raise ValueError(
                f"environment episode ({env.total_steps} steps) shorter than "
                f"sweep episode ({steps} steps)"
            )
        d0 = None
        for _ in range(steps):
            _, _, _, info = env.step(action)
            d = distance_matrix(pose_source(env))
            if d0 is None:
                d0 = d
            points.append(
                StabilityPoint(
                    delta=delta(d, d0),
                    omega_deg=tuple(info.omega_true_deg),
                    action=tuple(action),
                    t=env.t,
                )
            )
    return points


def synthetic_drift_log(
    rate: float, links: int = 3, steps: int = 100, spacing: float = 0.1
) -> PoseLog:
    """Pose log where one link separates linearly at ``rate`` m/step."""
    base = np.zeros((links, 3))
    base[:, 0] = np.arange(links) * spacing
    frames = []
    for k in range(steps):
        frame = base.copy()
        frame[-1, 0] += rate * k
        frames.append(frame)
    return PoseLog(
        positions=np.array(frames),
        link_names=tuple(f"link{i}" for i in range(links)),
    )


def ingest_pose_log(path) -> PoseLog:
    """Read a t,link,x,y,z CSV into a PoseLog.

    Link sets must be identical at every time step; ragged logs are
    rejected.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != "t,link,x,y,z":
        raise PoseLogError(f"{path}: expected header 't,link,x,y,z'")
    by_time: dict[float, dict[str, list[float]]] = {}
    for ln in lines[1:]:
        if not ln.strip():
            continue
        parts = ln.split(",")
        if len(parts) != 5:
            raise PoseLogError(f"{path}: bad row {ln!r}")
        try:
            t = float(parts[0])
            xyz = [float(v) for v in parts[2:]]
        except ValueError as exc:
            raise PoseLogError(f"{path}: bad number in row {ln!r}") from exc
        by_time.setdefault(t, {})[parts[1]] = xyz
    if not by_time:
        raise PoseLogError(f"{path}: no data rows")
    times = sorted(by_time)
    names = sorted(by_time[times[0]])
    frames = []
    for t in times:
        frame = by_time[t]
        if sorted(frame) != names:
            raise PoseLogError(
                f"{path}: ragged link set at t={t}: {sorted(frame)} vs {names}"
            )
        frames.append([frame[name] for name in names])
    return PoseLog(positions=np.array(frames), link_names=tuple(names))


def sweep_to_csv_text(points) -> str:
    """Serialize sweep output: action, t, body rates, drift."""
    out = ["action,t,omega_r,omega_p,omega_y,delta"]
    for p in points:
        action = "".join(str(int(a)) for a in p.action)
        row = [p.t, *p.omega_deg, p.delta]
        out.append(action + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(out) + "\n"

"""Episode traces: the time-indexed record every evaluation consumes.

CSV layout (full-precision decimal text):
t,sp_r,sp_p,sp_y,gyro_r,gyro_p,gyro_y,u0..u{M-1},rpm0..rpm{M-1},reward
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class TraceError(Exception):
    """Malformed trace file."""


@dataclass(frozen=True)
class EpisodeTrace:
    """Uniformly sampled episode record."""

    t: np.ndarray         # (N,)
    setpoint: np.ndarray  # (N, 3) deg/s
    gyro: np.ndarray      # (N, 3) deg/s, as measured (noise included)
    u: np.ndarray         # (N, M)
    rpm: np.ndarray       # (N, M)
    reward: np.ndarray    # (N,)

    def __post_init__(self):
        n = len(self.t)
        for name in ("setpoint", "gyro", "u", "rpm", "reward"):
            if len(getattr(self, name)) != n:
                raise TraceError(f"column {name} length != {n}")
        if n >= 2:
            dts = np.diff(self.t)
            if np.any(dts <= 0):
                raise TraceError("t must be strictly increasing")
            if not np.allclose(dts, dts[0], rtol=1e-6, atol=1e-12):
                raise TraceError("t must be uniformly sampled")

    @property
    def dt(self) -> float:
        if len(self.t) < 2:
            raise TraceError("need at least 2 samples for dt")
        return float(self.t[1] - self.t[0])

    @property
    def motor_count(self) -> int:
        return self.u.shape[1]

    def error(self) -> np.ndarray:
        """Tracking error setpoint - gyro, deg/s, shape (N, 3)."""
        return self.setpoint - self.gyro

    def header(self) -> str:
        m = self.motor_count
        cols = (
            ["t", "sp_r", "sp_p", "sp_y", "gyro_r", "gyro_p", "gyro_y"]
            + [f"u{i}" for i in range(m)]
            + [f"rpm{i}" for i in range(m)]
            + ["reward"]
        )
        return ",".join(cols)

    def to_csv_text(self) -> str:
        out = io.StringIO()
        out.write(self.header())
        out.write("\n")
        for i in range(len(self.t)):
            row = (
                [self.t[i]]
                + list(self.setpoint[i])
                + list(self.gyro[i])
                + list(self.u[i])
                + list(self.rpm[i])
                + [self.reward[i]]
            )
            out.write(",".join(repr(float(v)) for v in row))
            out.write("\n")
        return out.getvalue()

    def write_csv(self, path) -> None:
        atomic_write_text(path, self.to_csv_text())


def atomic_write_text(path, text: str) -> None:
    """Write-then-rename so a failed run never leaves a partial file."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def read_trace_csv(path) -> EpisodeTrace:
    text = Path(path).read_text(encoding="utf-8")
    return parse_trace_csv(text, origin=str(path))


def parse_trace_csv(text: str, origin: str = "<string>") -> EpisodeTrace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise TraceError(f"{origin}: need a header and at least one row")
    header = lines[0].split(",")
    if header[:7] != ["t", "sp_r", "sp_p", "sp_y", "gyro_r", "gyro_p", "gyro_y"]:
        raise TraceError(f"{origin}: unexpected header {lines[0]!r}")
    m = sum(1 for col in header if col.startswith("u") and col[1:].isdigit())
    expected = 7 + 2 * m + 1
    if len(header) != expected:
        raise TraceError(
            f"{origin}: expected {expected} columns for {m} motors, "
            f"got {len(header)}"
        )
    rows = []
    for ln in lines[1:]:
        vals = ln.split(",")
        if len(vals) != expected:
            raise TraceError(f"{origin}: row has {len(vals)} fields, want {expected}")
        try:
            rows.append([float(v) for v in vals])
        except ValueError as exc:
            raise TraceError(f"{origin}: bad number in row {ln!r}") from exc
    data = np.array(rows)
    return EpisodeTrace(
        t=data[:, 0],
        setpoint=data[:, 1:4],
        gyro=data[:, 4:7],
        u=data[:, 7 : 7 + m],
        rpm=data[:, 7 + m : 7 + 2 * m],
        reward=data[:, -1],
    )

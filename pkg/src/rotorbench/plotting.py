"""Figure rendering for CLI reports.

All figures go to files (Agg backend); nothing opens a window.  The data
modules stay plot-free — these helpers consume their CSV-ready outputs.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import AXES


def _save(fig, path):
    """Atomic savefig: render to a sibling temp file, then rename."""
    path = Path(path)
    tmp = path.with_name(path.stem + ".tmp" + path.suffix)
    fig.savefig(tmp, dpi=120)
    plt.close(fig)
    os.replace(tmp, path)


def save_trace_figure(trace, path, title: str = ""):
    """Setpoint-vs-response per axis plus the motor commands."""
    fig, axes = plt.subplots(4, 1, figsize=(9, 10), sharex=True)
    for i, name in enumerate(AXES):
        ax = axes[i]
        ax.plot(trace.t, trace.setpoint[:, i], "k--", lw=1.2, label="setpoint")
        ax.plot(trace.t, trace.gyro[:, i], lw=0.9, label="measured")
        ax.set_ylabel(f"{name} (deg/s)")
        ax.legend(loc="upper right", fontsize=8)
    for m in range(trace.u.shape[1]):
        axes[3].plot(trace.t, trace.u[:, m], lw=0.8, label=f"u{m}")
    axes[3].set_ylabel("control signal")
    axes[3].set_xlabel("time (s)")
    axes[3].set_ylim(-0.05, 1.05)
    axes[3].legend(loc="upper right", fontsize=8, ncol=4)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)


def save_dyno_figure(traces, path, reference=None, title: str = ""):
    """RPM / thrust / torque channels of one or more dyno traces."""
    if not isinstance(traces, (list, tuple)):
        traces = [traces]
    fig, axes = plt.subplots(3, 1, figsize=(9, 8), sharex=True)
    for k, tr in enumerate(traces):
        axes[0].plot(tr.t, tr.rpm, lw=0.9, label=f"run {k}" if len(traces) > 1 else "model")
        axes[1].plot(tr.t, tr.thrust, lw=0.9)
        axes[2].plot(tr.t, tr.torque, lw=0.9)
    if reference is not None:
        axes[0].plot(reference.t, reference.rpm, "k--", lw=1.0, label="reference")
        axes[1].plot(reference.t, reference.thrust, "k--", lw=1.0)
        axes[2].plot(reference.t, reference.torque, "k--", lw=1.0)
    axes[0].set_ylabel("RPM")
    axes[0].legend(loc="lower right", fontsize=8)
    axes[1].set_ylabel("thrust (N)")
    axes[2].set_ylabel("torque (N m)")
    axes[2].set_xlabel("time (s)")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)


def save_stability_figure(points, path, title: str = ""):
    """Drift against body-rate magnitude, one dot per sweep sample."""
    omega_mag = np.array([np.linalg.norm(p.omega_deg) for p in points])
    deltas = np.array([p.delta for p in points])
    fig, ax = plt.subplots(figsize=(8, 5))
    sc = ax.scatter(omega_mag, deltas, s=6, c=deltas, cmap="viridis")
    ax.set_xlabel("|body rate| (deg/s)")
    ax.set_ylabel("drift (m)")
    fig.colorbar(sc, ax=ax, label="drift (m)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def save_envelope_figure(points, path, title: str = ""):
    """Flight-envelope scatter: roll/pitch setpoints colored by MAE."""
    sp = np.array([p.setpoint for p in points])
    mae = np.array([p.mae for p in points])
    in_band = np.array([p.in_band for p in points])
    fig, ax = plt.subplots(figsize=(7, 6))
    sc = ax.scatter(sp[:, 0], sp[:, 1], c=mae, s=14, cmap="plasma")
    ax.scatter(
        sp[in_band, 0], sp[in_band, 1], facecolors="none",
        edgecolors="green", s=30, lw=0.6, label="in band",
    )
    ax.set_xlabel("roll setpoint (deg/s)")
    ax.set_ylabel("pitch setpoint (deg/s)")
    ax.legend(loc="upper right", fontsize=8)
    fig.colorbar(sc, ax=ax, label="MAE (deg/s)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)

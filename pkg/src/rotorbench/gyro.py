"""Gyro emulation: per-axis Gaussian noise on the angular-velocity channel.

Noise is injected at the environment boundary rather than inside the
dynamics so controllers can be evaluated against different noise levels
without touching the model.  Measurements are degrees per second and are
not clipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NoiseParams
from .units import DEG_PER_RAD


@dataclass(frozen=True)
class GyroSample:
    """One measured rate triple (deg/s) with its timestamp."""

    t: float
    rates: tuple[float, float, float]


def sample(omega_true, noise: NoiseParams, rng: np.random.Generator) -> np.ndarray:
    """Measure a true body rate (rad/s) as a noisy gyro reading (deg/s).

    Adds an independent Normal(mean, std) draw per axis.  With std 0 the
    draw collapses to the mean offset exactly, so zero-noise configs are
    bit-deterministic without special-casing.
    """
    deg = np.asarray(omega_true, dtype=float) * DEG_PER_RAD
    return deg + rng.normal(loc=noise.mean, scale=noise.std)


def fit_noise(samples) -> NoiseParams:
    """Fit per-axis Gaussian noise parameters from recorded rest samples.

    Uses the sample mean and the unbiased (N-1) standard deviation.
    ``samples`` is an (N, 3) array-like of deg/s readings or a sequence of
    GyroSample.
    """
    if len(samples) and isinstance(samples[0], GyroSample):
        data = np.array([s.rates for s in samples], dtype=float)
    else:
        data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError(f"expected an (N, 3) sample array, got shape {data.shape}")
    if data.shape[0] < 2:
        raise ValueError(f"need at least 2 samples, got {data.shape[0]}")
    mean = data.mean(axis=0)
    std = data.std(axis=0, ddof=1)
    return NoiseParams(
        mean=tuple(float(v) for v in mean),
        std=tuple(float(v) for v in std),
    )

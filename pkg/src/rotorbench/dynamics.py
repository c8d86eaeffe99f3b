"""Rotation-only rigid-body dynamics.

The airframe is fixed about its center of thrust and can only rotate, so
translation, gravity and collisions never enter.  Euler's rotational
equation with the gyroscopic coupling term is integrated with semi-implicit
Euler at a fixed step.  Everything here is a pure function over value
types; independent simulations parallelize freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

COS_45 = math.cos(math.pi / 4.0)


@dataclass(frozen=True)
class BodyState:
    """Angular state: body rates (rad/s), rotor speeds (rad/s), time (s)."""

    omega_body: np.ndarray
    rotor_omega: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "omega_body", np.asarray(self.omega_body, dtype=float)
        )
        object.__setattr__(
            self, "rotor_omega", np.asarray(self.rotor_omega, dtype=float)
        )

    @staticmethod
    def rest(motor_count: int) -> "BodyState":
        return BodyState(np.zeros(3), np.zeros(motor_count), 0.0)


@dataclass(frozen=True)
class BodyForces:
    """Aggregate aerodynamic effects and resulting body torque."""

    u_t: float
    u_phi: float
    u_theta: float
    u_psi: float
    tau_body: np.ndarray


def aero_effects(rotor_omega, b: float):
    """Thrust/roll/pitch/yaw effects of the four rotor speeds.

    Encodes the standard X-quad sign pattern:

        U_T   = B (w0^2 + w1^2 + w2^2 + w3^2)
        U_phi = B (w0^2 + w1^2 - w2^2 - w3^2)
        U_th  = B (w0^2 - w1^2 + w2^2 - w3^2)
        U_psi = B (w0^2 - w1^2 - w2^2 + w3^2)
    """
    w = np.asarray(rotor_omega, dtype=float)
    if w.shape != (4,):
        raise ValueError(f"expected 4 rotor speeds, got shape {w.shape}")
    sq = w * w
    u_t = b * sq.sum()
    u_phi = b * (sq[0] + sq[1] - sq[2] - sq[3])
    u_theta = b * (sq[0] - sq[1] + sq[2] - sq[3])
    u_psi = b * (sq[0] - sq[1] - sq[2] + sq[3])
    return u_t, u_phi, u_theta, u_psi


def body_forces(rotor_omega, rotor_torque, cfg) -> BodyForces:
    """Aggregate effects and body torque in one record (reward engineering)."""
    u_t, u_phi, u_theta, u_psi = aero_effects(rotor_omega, cfg.thrust_factor)
    return BodyForces(
        u_t=u_t,
        u_phi=u_phi,
        u_theta=u_theta,
        u_psi=u_psi,
        tau_body=body_torque(rotor_omega, rotor_torque, cfg),
    )


def body_torque(rotor_omega, rotor_torque, cfg) -> np.ndarray:
    """Torque on the airframe from rotor speeds and reaction torques.

    Roll and pitch come from differential thrust acting at l*cos(pi/4) from
    the axis (X configuration); yaw is the sum of rotor reaction torques,
    each opposing its rotor's spin direction (Newton's third law).
    """
    w = np.asarray(rotor_omega, dtype=float)
    q = np.asarray(rotor_torque, dtype=float)
    if w.shape != (cfg.motor_count,) or q.shape != (cfg.motor_count,):
        raise ValueError(
            f"expected {cfg.motor_count} rotor speeds/torques, got "
            f"{w.shape} and {q.shape}"
        )
    _, u_phi, u_theta, _ = aero_effects(w, cfg.thrust_factor)
    lever = cfg.arm_length * COS_45
    tau_psi = sum(-s * qi for s, qi in zip(cfg.spin_dirs, q))
    return np.array([lever * u_phi, lever * u_theta, tau_psi])


def angular_step(state: BodyState, tau, inertia, dt: float) -> np.ndarray:
    """One semi-implicit Euler step of Euler's rotational equation.

    Omega' = Omega + dt * I^-1 (tau - Omega x (I Omega))
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    omega = state.omega_body
    inertia = np.asarray(inertia, dtype=float)
    l_mom = inertia @ omega
    rhs = np.asarray(tau, dtype=float) - np.cross(omega, l_mom)
    try:
        accel = np.linalg.solve(inertia, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular inertia matrix") from exc
    return omega + dt * accel


def step(state: BodyState, rotor_thrust, rotor_torque, cfg, dt: float) -> BodyState:
    """Advance the body one step under the given per-rotor thrust/torque.

    Rotor speeds are owned by the propulsion model and pass through
    untouched; only body rates and time advance here.
    """
    del rotor_thrust  # thrust cancels about a ball joint; torque is what acts
    tau = body_torque(state.rotor_omega, rotor_torque, cfg)
    omega_new = angular_step(state, tau, cfg.inertia, dt)
    return replace(state, omega_body=omega_new, t=state.t + dt)


def kinetic_energy(state: BodyState, inertia) -> float:
    """Rotational kinetic energy 0.5 * Omega^T I Omega."""
    w = state.omega_body
    return 0.5 * float(w @ (np.asarray(inertia) @ w))

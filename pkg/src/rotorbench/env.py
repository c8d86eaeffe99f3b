"""Episode orchestration: the lockstep step/reset loop.

One ``step`` call advances the physics exactly one fixed increment, so the
caller drives the simulation clock.  Observations are (e, delta-e) in
deg/s; internals run in rad/s.  Determinism contract: identical (config,
seed, command sequence) produce bit-identical observations, rewards and
traces.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import dynamics, gyro, motors, rewards
from .config import AircraftConfig, NoiseParams
from .tasks import TaskSchedule
from .trace import EpisodeTrace
from .units import DEG_PER_RAD, rpm_to_rads

REWARD_VERSIONS = ("v1", "v2", "v3")

_ZERO_NOISE = NoiseParams()


class EpisodeDone(Exception):
    """step() was called on a finished episode."""


@dataclass
class StepInfo:
    """Extras exposed alongside the observation for metrics and debugging."""

    omega_true_deg: np.ndarray
    gyro_deg: np.ndarray
    rotor_rpm: np.ndarray
    rotor_thrust: np.ndarray
    rotor_torque: np.ndarray
    setpoint_deg: np.ndarray
    u_applied: np.ndarray
    clamped_commands: int


class SimEnv:
    """Closed world wiring config, dynamics, motors, sensors and rewards.

    One environment is one logical thread of control; run many environments
    for parallel evaluation, never one environment from many threads.
    """

    def __init__(
        self,
        cfg: AircraftConfig,
        task_factory,
        reward_version: str = "v1",
        reward_params: rewards.RewardParams | None = None,
        seed: int = 0,
        noise: bool = True,
        gravity: bool = False,
    ):
        if reward_version not in REWARD_VERSIONS:
            raise ValueError(
                f"unknown reward version {reward_version!r}; "
                f"choose from {REWARD_VERSIONS}"
            )
        if gravity:
            warnings.warn(
                "gravity has no effect in this rotation-only world: the body "
                "is fixed about its center of thrust and has no translational "
                "channel to act on",
                stacklevel=2,
            )
        self.cfg = cfg
        self.task_factory = task_factory
        self.reward_version = reward_version
        self.reward_params = reward_params or rewards.RewardParams()
        self.noise = noise
        self._base_seed = seed
        self.reset(seed)

    # -- episode lifecycle ---------------------------------------------------

    def reset(self, seed: int | None = None) -> np.ndarray:
        """Start a fresh episode; returns the initial observation.

        The task is re-sampled from the seed and every accumulator returns
        to zero, so sensor-facing state reflects the reset immediately.  The
        initial observation uses the true rest rate (zero), making resets
        with equal seeds bit-identical.
        """
        if seed is not None:
            self._base_seed = seed
        ss = np.random.SeedSequence(self._base_seed)
        task_seed, noise_seed = ss.spawn(2)
        self._noise_rng = np.random.default_rng(noise_seed)
        self.task: TaskSchedule = self.task_factory(
            int(task_seed.generate_state(1)[0])
        )
        m = self.cfg.motor_count
        self.body = dynamics.BodyState.rest(m)
        self.motor_states = [motors.MotorState() for _ in range(m)]
        self.reward_state = rewards.RewardState()
        self.reward_state.reset(m)
        self.prev_e = np.zeros(3)
        self.steps = 0
        self.clamped_commands = 0
        self.total_steps = int(round(self.task.episode_length / self.cfg.sim_dt))

        sp = self.task.setpoint_at(0.0)
        e = sp - np.zeros(3)
        obs = np.concatenate([e, e - self.prev_e])
        self.prev_e = e
        return obs

    @property
    def done(self) -> bool:
        return self.steps >= self.total_steps

    @property
    def t(self) -> float:
        return self.body.t

    def step(self, u, a_raw=None):
        """Advance exactly one physics step under motor commands u.

        Order: rotors chase their throttle targets, thrust/torque are
        computed, the body rotates, the gyro is sampled with noise, the
        schedule is read at the new time, and the configured reward is
        evaluated.  Raw pre-squash outputs may be supplied for the
        saturation penalty; they default to u.
        """
        if self.done:
            raise EpisodeDone(f"episode finished after {self.steps} steps")
        u = np.asarray(u, dtype=float)
        if u.shape != (self.cfg.motor_count,):
            raise ValueError(
                f"expected {self.cfg.motor_count} commands, got shape {u.shape}"
            )
        if np.any(u < 0.0) or np.any(u > 1.0):
            self.clamped_commands += 1
            u = np.clip(u, 0.0, 1.0)
        a_raw = u if a_raw is None else np.asarray(a_raw, dtype=float)
        dt = self.cfg.sim_dt

        for i, (ms, mp) in enumerate(zip(self.motor_states, self.cfg.motors)):
            target = motors.throttle_to_target(u[i], mp.h_coeffs)
            self.motor_states[i] = motors.motor_response_step(ms, target, mp, dt)
        rpm = np.array([ms.omega for ms in self.motor_states])
        thrusts = motors.rotor_thrusts(rpm, self.cfg.motors)
        torques = motors.rotor_torques(thrusts, self.cfg.motors)

        body = replace(self.body, rotor_omega=rpm_to_rads(rpm))
        body = dynamics.step(body, thrusts, torques, self.cfg, dt)
        self.steps += 1
        # Pin t to steps*dt so schedule boundaries never suffer accumulated
        # addition error (lockstep law: env.t == steps * dt).
        self.body = replace(body, t=self.steps * dt)

        measured = gyro.sample(
            self.body.omega_body,
            self.cfg.gyro_noise if self.noise else _ZERO_NOISE,
            self._noise_rng,
        )
        sp = self.task.setpoint_at(self.body.t)
        e = sp - measured

        reward = self._compute_reward(e, u, a_raw, sp)
        obs = np.concatenate([e, e - self.prev_e])
        self.prev_e = e

        info = StepInfo(
            omega_true_deg=self.body.omega_body * DEG_PER_RAD,
            gyro_deg=measured,
            rotor_rpm=rpm,
            rotor_thrust=thrusts,
            rotor_torque=torques,
            setpoint_deg=sp,
            u_applied=u,
            clamped_commands=self.clamped_commands,
        )
        return obs, reward, self.done, info

    def _compute_reward(self, e_deg, u, a_raw, sp_deg) -> float:
        params = self.reward_params
        if self.reward_version == "v1":
            return rewards.reward_v1(e_deg / DEG_PER_RAD, params.omega_max)
        if self.reward_version == "v2":
            scale = params.output_scale
            delta_y = (u - self.reward_state.prev_u) * scale
            in_band = rewards.in_error_band(e_deg, sp_deg, params.epsilon)
            r = rewards.reward_v2(e_deg, u, delta_y, in_band, params)
            self.reward_state.prev_u = u.copy()
            return r
        r, self.reward_state = rewards.reward_v3(
            self.reward_state, e_deg, u, a_raw, sp_deg, params
        )
        return r

    # -- rollout helpers -------------------------------------------------------

    def replay_commands(self, commands, seed: int | None = None) -> EpisodeTrace:
        """Open-loop rollout: apply each command row for exactly one step."""
        commands = np.asarray(commands, dtype=float)
        self.reset(seed)
        if len(commands) > self.total_steps:
            raise ValueError(
                f"{len(commands)} commands exceed the {self.total_steps}-step episode"
            )
        rows_t, rows_sp, rows_gyro, rows_u, rows_rpm, rows_r = [], [], [], [], [], []
        for u in commands:
            _, reward, _, info = self.step(u)
            rows_t.append(self.body.t)
            rows_sp.append(info.setpoint_deg)
            rows_gyro.append(info.gyro_deg)
            rows_u.append(info.u_applied)
            rows_rpm.append(info.rotor_rpm)
            rows_r.append(reward)
        return EpisodeTrace(
            t=np.array(rows_t),
            setpoint=np.array(rows_sp),
            gyro=np.array(rows_gyro),
            u=np.array(rows_u),
            rpm=np.array(rows_rpm),
            reward=np.array(rows_r),
        )

    def run_episode(self, controller, seed: int | None = None) -> EpisodeTrace:
        """Closed-loop rollout recording one trace row per step."""
        obs = self.reset(seed)
        controller.reset()
        dt = self.cfg.sim_dt
        rows_t, rows_sp, rows_gyro, rows_u, rows_rpm, rows_r = [], [], [], [], [], []
        while not self.done:
            e = obs[:3]
            result = controller.act(e, dt)
            u, a_raw = result if isinstance(result, tuple) else (result, None)
            obs, reward, _, info = self.step(u, a_raw)
            rows_t.append(self.body.t)
            rows_sp.append(info.setpoint_deg)
            rows_gyro.append(info.gyro_deg)
            rows_u.append(info.u_applied)
            rows_rpm.append(info.rotor_rpm)
            rows_r.append(reward)
        return EpisodeTrace(
            t=np.array(rows_t),
            setpoint=np.array(rows_sp),
            gyro=np.array(rows_gyro),
            u=np.array(rows_u),
            rpm=np.array(rows_rpm),
            reward=np.array(rows_r),
        )

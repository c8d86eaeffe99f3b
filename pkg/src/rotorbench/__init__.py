"""Quadcopter attitude-control workbench.

Simulate a rotation-only quadcopter digital twin, run PID or neural
policies against generated setpoint tasks, score them with step-response
and integral-error metrics, identify propulsion constants with a virtual
dynamometer, and expose the environment to external tuners over a lockstep
UDP protocol.
"""

from .config import (
    AircraftConfig,
    ConfigError,
    NoiseParams,
    load_aircraft_config,
    load_preset,
    scale_inertia,
    validate,
)
from .control import PidGains, PidState, mix, pid_eval, ultimate_gain_search, zn_tune
from .controllers import ConstantController, ControlFrame, NeuroController, PidController
from .dynamics import BodyState, aero_effects, angular_step, body_torque
from .env import SimEnv
from .metrics import (
    band_fraction,
    compute_step_metrics,
    envelope_scan,
    error_metrics,
    peak,
    rise_time,
    stability_slope,
    success_failure,
)
from .motors import MotorParams, MotorState, motor_response_step, throttle_to_target
from .policy import MlpPolicy, build_input, load_policy, policy_forward, save_policy
from .rewards import RewardParams, RewardState, reward_v1, reward_v2, reward_v3
from .tasks import TaskSchedule, continuous_random, episodic_uniform, pulse
from .trace import EpisodeTrace, read_trace_csv

__version__ = "0.1.0"

"""Aircraft description: the digital twin's parameter file.

The config is a flat UTF-8 key-value text format (INI sections, ``#``
comments).  Unknown keys or sections are an error so typos cannot silently
fall back to defaults.  All values are SI except noise parameters, which are
degrees per second.  Configs are immutable after load and safe to share
across threads.
"""

from __future__ import annotations

import configparser
import importlib.resources
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .motors import MotorParams


class ConfigError(Exception):
    """Malformed or invalid aircraft configuration."""


@dataclass(frozen=True)
class NoiseParams:
    """Per-axis Gaussian gyro-noise parameters in deg/s."""

    mean: tuple[float, float, float] = (0.0, 0.0, 0.0)
    std: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if any(s < 0 for s in self.std):
            raise ConfigError(f"noise std must be non-negative, got {self.std}")


@dataclass(frozen=True)
class AircraftConfig:
    """Geometry, inertia, mixer, motors and sensor noise for one airframe."""

    motor_count: int
    arm_length: float
    thrust_factor: float
    inertia: np.ndarray  # 3x3, kg*m^2
    spin_dirs: tuple[int, ...]
    mixer: np.ndarray  # motor_count x 3, columns roll/pitch/yaw
    motors: tuple[MotorParams, ...]
    gyro_noise: NoiseParams = field(default_factory=NoiseParams)
    sim_dt: float = 1e-3
    center_of_thrust_offset: float = 0.0
    name: str = ""

    def __post_init__(self):
        # Construction never validates: ``validate`` reports violations as
        # data, and loaders decide whether to raise.
        object.__setattr__(self, "inertia", np.asarray(self.inertia, dtype=float))
        object.__setattr__(self, "mixer", np.asarray(self.mixer, dtype=float))
        self.inertia.setflags(write=False)
        self.mixer.setflags(write=False)


def validate(cfg: AircraftConfig) -> list[str]:
    """Return a list of invariant violations (empty means valid).

    Violations are data rather than exceptions so callers can report them
    all at once.  A non-balanced spin set on a quad is suspicious but legal
    (warned by the CLI, not rejected here).
    """
    problems = []
    if cfg.motor_count < 1:
        problems.append(f"motor_count: must be >= 1, got {cfg.motor_count}")
    if cfg.arm_length <= 0:
        problems.append(f"arm_length: must be positive, got {cfg.arm_length}")
    if cfg.thrust_factor <= 0:
        problems.append(f"thrust_factor: must be positive, got {cfg.thrust_factor}")
    if cfg.sim_dt <= 0:
        problems.append(f"sim_dt: must be positive, got {cfg.sim_dt}")

    inertia = np.asarray(cfg.inertia, dtype=float)
    if inertia.shape != (3, 3):
        problems.append(f"inertia: must be 3x3, got shape {inertia.shape}")
    else:
        if not np.allclose(inertia, inertia.T, rtol=1e-9, atol=0.0):
            problems.append("inertia: must be symmetric")
        else:
            eig = np.linalg.eigvalsh(inertia)
            if np.any(eig <= 0):
                problems.append(
                    f"inertia: must be positive-definite, eigenvalues {eig}"
                )

    if len(cfg.spin_dirs) != cfg.motor_count:
        problems.append(
            f"spin_dirs: expected {cfg.motor_count} entries, got {len(cfg.spin_dirs)}"
        )
    if any(s not in (-1, 1) for s in cfg.spin_dirs):
        problems.append(f"spin_dirs: entries must be +1 or -1, got {cfg.spin_dirs}")

    mixer = np.asarray(cfg.mixer, dtype=float)
    if mixer.shape != (cfg.motor_count, 3):
        problems.append(
            f"mixer: expected {cfg.motor_count} rows of 3, got shape {mixer.shape}"
        )
    elif np.any(np.abs(mixer) > 1.0):
        problems.append("mixer: entries must lie in [-1, 1]")

    if len(cfg.motors) != cfg.motor_count:
        problems.append(
            f"motors: expected {cfg.motor_count} entries, got {len(cfg.motors)}"
        )
    return problems


def spin_balance_warning(cfg: AircraftConfig) -> str | None:
    """Non-fatal check: a standard quad should have spin directions sum to 0."""
    if cfg.motor_count == 4 and sum(cfg.spin_dirs) != 0:
        return (
            f"spin_dirs {cfg.spin_dirs} do not balance (sum "
            f"{sum(cfg.spin_dirs)}); yaw authority will be asymmetric"
        )
    return None


def scale_inertia(i_mesh: np.ndarray, unit_scale: float, mass: float, volume: float):
    """Scale a mesh-tool inertia tensor to physical units.

    Mesh tools integrate at unit density in mesh length units; the physical
    tensor is I = I' * unit_scale^2 * mass / volume.
    """
    if unit_scale <= 0:
        raise ValueError(f"unit_scale must be positive, got {unit_scale}")
    if mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    if volume <= 0:
        raise ValueError(f"volume must be positive, got {volume}")
    return np.asarray(i_mesh, dtype=float) * (unit_scale**2 * mass / volume)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

_AIRCRAFT_KEYS = {
    "motor_count",
    "arm_length",
    "thrust_factor",
    "inertia",
    "spin_dirs",
    "sim_dt",
    "center_of_thrust_offset",
    "name",
}
_NOISE_KEYS = {"mean", "std"}
_MOTOR_KEYS = {
    "kt",
    "kq",
    "h_coeffs",
    "kp",
    "ki",
    "kd",
    "f_min",
    "f_max",
    "response_scale",
    "omega_max",
}


def _floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split()]
    except ValueError as exc:
        raise ConfigError(f"expected whitespace-separated numbers, got {text!r}") from exc


def _parse_ini(text: str, origin: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
        strict=True,
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: parse error: {exc}") from exc
    return parser


def _check_keys(section: str, present, allowed, required, origin: str):
    unknown = set(present) - allowed
    if unknown:
        raise ConfigError(
            f"{origin}: unknown key(s) {sorted(unknown)} in [{section}]"
        )
    missing = set(required) - set(present)
    if missing:
        raise ConfigError(
            f"{origin}: missing key(s) {sorted(missing)} in [{section}]"
        )


def loads_aircraft_config(text: str, origin: str = "<string>") -> AircraftConfig:
    """Parse an aircraft config from text.  See ``load_aircraft_config``."""
    parser = _parse_ini(text, origin)

    sections = set(parser.sections())
    if "aircraft" not in sections:
        raise ConfigError(f"{origin}: missing [aircraft] section")
    ac = parser["aircraft"]
    _check_keys(
        "aircraft",
        ac.keys(),
        _AIRCRAFT_KEYS,
        {"motor_count", "arm_length", "thrust_factor", "inertia", "spin_dirs", "sim_dt"},
        origin,
    )
    try:
        motor_count = int(ac["motor_count"])
    except ValueError as exc:
        raise ConfigError(f"{origin}: motor_count must be an integer") from exc

    inertia_vals = _floats(ac["inertia"])
    if len(inertia_vals) not in (3, 9):
        raise ConfigError(
            f"{origin}: inertia needs 3 (diagonal) or 9 (row-major) numbers, "
            f"got {len(inertia_vals)}"
        )
    if len(inertia_vals) == 3:
        inertia = np.diag(inertia_vals)
    else:
        inertia = np.array(inertia_vals).reshape(3, 3)

    spin_dirs = tuple(int(s) for s in _floats(ac["spin_dirs"]))

    if "mixer" not in sections:
        raise ConfigError(f"{origin}: missing [mixer] section")
    mixer_sec = parser["mixer"]
    expected_rows = {f"motor{i}" for i in range(motor_count)}
    _check_keys("mixer", mixer_sec.keys(), expected_rows, expected_rows, origin)
    mixer = []
    for i in range(motor_count):
        row = _floats(mixer_sec[f"motor{i}"])
        if len(row) != 3:
            raise ConfigError(
                f"{origin}: mixer motor{i} needs 3 values (roll pitch yaw)"
            )
        mixer.append(row)

    noise = NoiseParams()
    if "gyro_noise" in sections:
        ns = parser["gyro_noise"]
        _check_keys("gyro_noise", ns.keys(), _NOISE_KEYS, _NOISE_KEYS, origin)
        mean = _floats(ns["mean"])
        std = _floats(ns["std"])
        if len(mean) != 3 or len(std) != 3:
            raise ConfigError(f"{origin}: gyro_noise mean/std need 3 values each")
        noise = NoiseParams(mean=tuple(mean), std=tuple(std))

    if "motors" not in sections:
        raise ConfigError(f"{origin}: missing [motors] section")
    shared = dict(parser["motors"])
    _check_keys(
        "motors", shared.keys(), _MOTOR_KEYS, {"kt", "kq", "h_coeffs", "omega_max"}, origin
    )

    override_names = {s for s in sections if s.startswith("motor.")}
    known = {"aircraft", "mixer", "gyro_noise", "motors"} | {
        f"motor.{i}" for i in range(motor_count)
    }
    stray = sections - known
    if stray:
        raise ConfigError(f"{origin}: unknown section(s) {sorted(stray)}")

    motors = []
    for i in range(motor_count):
        fields = dict(shared)
        name = f"motor.{i}"
        if name in override_names:
            over = dict(parser[name])
            _check_keys(name, over.keys(), _MOTOR_KEYS, set(), origin)
            fields.update(over)
        try:
            motors.append(
                MotorParams(
                    kt=float(fields["kt"]),
                    kq=float(fields["kq"]),
                    h_coeffs=tuple(_floats(fields["h_coeffs"])),
                    kp=float(fields.get("kp", 1e-4)),
                    ki=float(fields.get("ki", 0.0)),
                    kd=float(fields.get("kd", 0.0)),
                    f_min=float(fields.get("f_min", -1.0)),
                    f_max=float(fields.get("f_max", 1.0)),
                    response_scale=float(fields.get("response_scale", 1.0)),
                    omega_max=float(fields["omega_max"]),
                    spin_dir=spin_dirs[i] if i < len(spin_dirs) else 1,
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{origin}: motor {i}: {exc}") from exc

    cfg = AircraftConfig(
        motor_count=motor_count,
        arm_length=float(ac["arm_length"]),
        thrust_factor=float(ac["thrust_factor"]),
        inertia=inertia,
        spin_dirs=spin_dirs,
        mixer=np.array(mixer),
        motors=tuple(motors),
        gyro_noise=noise,
        sim_dt=float(ac["sim_dt"]),
        center_of_thrust_offset=float(ac.get("center_of_thrust_offset", 0.0)),
        name=ac.get("name", ""),
    )
    problems = validate(cfg)
    if problems:
        raise ConfigError(f"{origin}: " + "; ".join(problems))
    return cfg


def load_aircraft_config(path) -> AircraftConfig:
    """Load and validate an aircraft config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return loads_aircraft_config(text, origin=str(path))


def dumps_aircraft_config(cfg: AircraftConfig) -> str:
    """Serialize a config back to the file format.

    Numbers are written with repr so load -> dump -> load round-trips every
    field bit-identically.
    """
    def nums(values):
        return " ".join(repr(float(v)) for v in values)

    lines = ["[aircraft]"]
    if cfg.name:
        lines.append(f"name = {cfg.name}")
    lines.append(f"motor_count = {cfg.motor_count}")
    lines.append(f"arm_length = {cfg.arm_length!r}")
    lines.append(f"thrust_factor = {cfg.thrust_factor!r}")
    lines.append(f"inertia = {nums(np.asarray(cfg.inertia).ravel())}")
    lines.append(f"spin_dirs = {' '.join(str(s) for s in cfg.spin_dirs)}")
    lines.append(f"sim_dt = {cfg.sim_dt!r}")
    lines.append(f"center_of_thrust_offset = {cfg.center_of_thrust_offset!r}")
    lines.append("")
    lines.append("[mixer]")
    for i, row in enumerate(np.asarray(cfg.mixer)):
        lines.append(f"motor{i} = {nums(row)}")
    lines.append("")
    lines.append("[gyro_noise]")
    lines.append(f"mean = {nums(cfg.gyro_noise.mean)}")
    lines.append(f"std = {nums(cfg.gyro_noise.std)}")
    lines.append("")

    base = cfg.motors[0]
    lines.append("[motors]")
    lines.append(f"kt = {base.kt!r}")
    lines.append(f"kq = {base.kq!r}")
    lines.append(f"h_coeffs = {nums(base.h_coeffs)}")
    lines.append(f"kp = {base.kp!r}")
    lines.append(f"ki = {base.ki!r}")
    lines.append(f"kd = {base.kd!r}")
    lines.append(f"f_min = {base.f_min!r}")
    lines.append(f"f_max = {base.f_max!r}")
    lines.append(f"response_scale = {base.response_scale!r}")
    lines.append(f"omega_max = {base.omega_max!r}")
    for i, m in enumerate(cfg.motors):
        diffs = {}
        for key in ("kt", "kq", "kp", "ki", "kd", "f_min", "f_max",
                    "response_scale", "omega_max"):
            if getattr(m, key) != getattr(base, key):
                diffs[key] = repr(getattr(m, key))
        if m.h_coeffs != base.h_coeffs:
            diffs["h_coeffs"] = nums(m.h_coeffs)
        if diffs:
            lines.append("")
            lines.append(f"[motor.{i}]")
            for key, val in diffs.items():
                lines.append(f"{key} = {val}")
    lines.append("")
    return "\n".join(lines)


PRESET_NAMES = ("iris-ch3", "nf1-ch5")


def load_preset(name: str) -> AircraftConfig:
    """Load one of the configs shipped with the package."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    ref = importlib.resources.files("rotorbench.presets").joinpath(f"{name}.acft")
    return loads_aircraft_config(ref.read_text(encoding="utf-8"), origin=f"preset:{name}")


def resolve_config(spec: str) -> AircraftConfig:
    """Resolve a CLI --config value: preset name or file path."""
    if spec in PRESET_NAMES:
        return load_preset(spec)
    return load_aircraft_config(spec)

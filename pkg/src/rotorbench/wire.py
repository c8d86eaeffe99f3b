"""Binary lockstep protocol: one fixed little-endian layout.

Every datagram is  magic 'GFC2' | version u8 | kind u8 | seq u32 LE |
payload.  Payloads:

  RESET (0)  empty, or an 8-byte unsigned little-endian seed
  STEP  (1)  M IEEE-754 doubles (little-endian), commands in [0, 1]
  STATE (128) sim_time f64 | setpoint 3*f64 deg/s | gyro 3*f64 deg/s |
              rotor speed M*f64 RPM | reward f64 | done u8
  ERROR (129) reason u8 | optional UTF-8 message

The layout is dependency-free and bit-exact so clients in any language can
implement it from this table alone.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"GFC2"
VERSION = 1

KIND_RESET = 0
KIND_STEP = 1
KIND_STATE = 128
KIND_ERROR = 129

ERR_MALFORMED = 1
ERR_VERSION = 2
ERR_LENGTH = 3
ERR_KIND = 4
ERR_SEQUENCE = 5
ERR_DONE = 6

ERROR_NAMES = {
    ERR_MALFORMED: "malformed",
    ERR_VERSION: "version",
    ERR_LENGTH: "length",
    ERR_KIND: "kind",
    ERR_SEQUENCE: "sequence",
    ERR_DONE: "done",
}

_HEADER = struct.Struct("<4sBBI")


class WireError(Exception):
    """Datagram does not decode under the protocol."""

    def __init__(self, reason: int, message: str):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class ResetMsg:
    seq: int
    seed: int | None = None


@dataclass(frozen=True)
class StepMsg:
    seq: int
    commands: tuple[float, ...]


@dataclass(frozen=True)
class StateMsg:
    seq: int
    sim_time: float
    setpoint: tuple[float, float, float]
    gyro: tuple[float, float, float]
    rotor_rpm: tuple[float, ...]
    reward: float
    done: bool


@dataclass(frozen=True)
class ErrorMsg:
    seq: int
    reason: int
    message: str = ""


def encode(msg) -> bytes:
    if isinstance(msg, ResetMsg):
        payload = b"" if msg.seed is None else struct.pack("<Q", msg.seed)
        return _HEADER.pack(MAGIC, VERSION, KIND_RESET, msg.seq) + payload
    if isinstance(msg, StepMsg):
        payload = struct.pack(f"<{len(msg.commands)}d", *msg.commands)
        return _HEADER.pack(MAGIC, VERSION, KIND_STEP, msg.seq) + payload
    if isinstance(msg, StateMsg):
        m = len(msg.rotor_rpm)
        payload = struct.pack(
            f"<d3d3d{m}ddB",
            msg.sim_time,
            *msg.setpoint,
            *msg.gyro,
            *msg.rotor_rpm,
            msg.reward,
            1 if msg.done else 0,
        )
        return _HEADER.pack(MAGIC, VERSION, KIND_STATE, msg.seq) + payload
    if isinstance(msg, ErrorMsg):
        payload = struct.pack("<B", msg.reason) + msg.message.encode("utf-8")
        return _HEADER.pack(MAGIC, VERSION, KIND_ERROR, msg.seq) + payload
    raise TypeError(f"not a wire message: {type(msg)}")


def decode(data: bytes, motor_count: int | None = None):
    """Decode one datagram; ``motor_count`` sizes STEP/STATE payloads.

    Raises WireError with a protocol reason code on any malformation.
    """
    if len(data) < _HEADER.size:
        raise WireError(ERR_MALFORMED, f"datagram too short ({len(data)} bytes)")
    magic, version, kind, seq = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise WireError(ERR_MALFORMED, f"bad magic {magic!r}")
    if version != VERSION:
        raise WireError(ERR_VERSION, f"unsupported version {version}")
    payload = data[_HEADER.size :]

    if kind == KIND_RESET:
        if len(payload) == 0:
            return ResetMsg(seq=seq)
        if len(payload) == 8:
            return ResetMsg(seq=seq, seed=struct.unpack("<Q", payload)[0])
        raise WireError(ERR_LENGTH, f"RESET payload must be 0 or 8 bytes, got {len(payload)}")

    if kind == KIND_STEP:
        if len(payload) % 8 != 0:
            raise WireError(ERR_LENGTH, f"STEP payload not a multiple of 8: {len(payload)}")
        n = len(payload) // 8
        if motor_count is not None and n != motor_count:
            raise WireError(
                ERR_LENGTH, f"expected {motor_count} commands, got {n}"
            )
        return StepMsg(seq=seq, commands=struct.unpack(f"<{n}d", payload))

    if kind == KIND_STATE:
        fixed = 8 * 8 + 1  # sim_time + setpoint + gyro + reward doubles, done byte
        if (len(payload) - fixed) % 8 != 0 or len(payload) < fixed + 8:
            raise WireError(ERR_LENGTH, f"bad STATE payload length {len(payload)}")
        m = (len(payload) - fixed) // 8
        if motor_count is not None and m != motor_count:
            raise WireError(ERR_LENGTH, f"expected {motor_count} rotors, got {m}")
        values = struct.unpack(f"<{8 + m}dB", payload)
        return StateMsg(
            seq=seq,
            sim_time=values[0],
            setpoint=values[1:4],
            gyro=values[4:7],
            rotor_rpm=values[7 : 7 + m],
            reward=values[7 + m],
            done=bool(values[8 + m]),
        )

    if kind == KIND_ERROR:
        if len(payload) < 1:
            raise WireError(ERR_LENGTH, "ERROR payload missing reason byte")
        return ErrorMsg(
            seq=seq,
            reason=payload[0],
            message=payload[1:].decode("utf-8", errors="replace"),
        )

    raise WireError(ERR_KIND, f"unknown message kind {kind}")


def state_from_env(seq: int, env, info, reward: float) -> StateMsg:
    return StateMsg(
        seq=seq,
        sim_time=env.t,
        setpoint=tuple(float(v) for v in info.setpoint_deg),
        gyro=tuple(float(v) for v in info.gyro_deg),
        rotor_rpm=tuple(float(v) for v in info.rotor_rpm),
        reward=float(reward),
        done=env.done,
    )

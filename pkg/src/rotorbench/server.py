"""UDP lockstep server: each STEP datagram advances exactly one sim step.

The request/response loop is single-threaded and strictly alternating (one
message in flight); parallel training farms run one server per port.  The
sequence number must increase by one between messages — out-of-order or
repeated datagrams get an ERROR instead of being silently dropped.
"""

from __future__ import annotations

import socket

import numpy as np

from . import wire
from .env import SimEnv


class LockstepServer:
    """Owns one environment and one UDP socket."""

    def __init__(self, env: SimEnv, host: str = "127.0.0.1", port: int = 0,
                 timeout: float | None = None):
        self.env = env
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.sock.bind((host, port))
        if timeout is not None:
            self.sock.settimeout(timeout)
        self._expected_seq = None
        self._running = False

    @property
    def address(self):
        return self.sock.getsockname()

    def close(self):
        self._running = False
        self.sock.close()

    def stop(self):
        self._running = False

    def serve_forever(self, max_requests: int | None = None):
        """Process datagrams until stopped (or max_requests, for tests)."""
        self._running = True
        handled = 0
        while self._running:
            if max_requests is not None and handled >= max_requests:
                break
            try:
                data, peer = self.sock.recvfrom(65536)
            except socket.timeout:
                continue
            except OSError:
                break
            reply = self.handle_datagram(data)
            self.sock.sendto(wire.encode(reply), peer)
            handled += 1

    def handle_datagram(self, data: bytes):
        """Decode, enforce lockstep, and run one protocol action."""
        try:
            msg = wire.decode(data, motor_count=self.env.cfg.motor_count)
        except wire.WireError as exc:
            return wire.ErrorMsg(seq=0, reason=exc.reason, message=str(exc))

        if isinstance(msg, wire.ResetMsg):
            seed = msg.seed if msg.seed is not None else None
            self.env.reset(seed)
            self._expected_seq = (msg.seq + 1) & 0xFFFFFFFF
            info_sp = self.env.task.setpoint_at(0.0)
            return wire.StateMsg(
                seq=msg.seq,
                sim_time=self.env.t,
                setpoint=tuple(float(v) for v in info_sp),
                gyro=(0.0, 0.0, 0.0),
                rotor_rpm=tuple(0.0 for _ in range(self.env.cfg.motor_count)),
                reward=0.0,
                done=False,
            )

        if isinstance(msg, wire.StepMsg):
            if self._expected_seq is None:
                return wire.ErrorMsg(
                    seq=msg.seq,
                    reason=wire.ERR_SEQUENCE,
                    message="STEP before RESET",
                )
            if msg.seq != self._expected_seq:
                return wire.ErrorMsg(
                    seq=msg.seq,
                    reason=wire.ERR_SEQUENCE,
                    message=f"expected seq {self._expected_seq}, got {msg.seq}",
                )
            if self.env.done:
                return wire.ErrorMsg(
                    seq=msg.seq, reason=wire.ERR_DONE, message="episode done; RESET first"
                )
            self._expected_seq = (self._expected_seq + 1) & 0xFFFFFFFF
            u = np.array(msg.commands, dtype=float)
            _, reward, _, info = self.env.step(u)
            return wire.state_from_env(msg.seq, self.env, info, reward)

        return wire.ErrorMsg(
            seq=getattr(msg, "seq", 0),
            reason=wire.ERR_KIND,
            message=f"server cannot handle {type(msg).__name__}",
        )

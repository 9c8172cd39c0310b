"""Conformance checker for external generator servers.

Runs the handshake, a batch of random GEN/DISC round trips with strict
payload validation, and a malformed-frame rejection probe on a fresh
connection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from aevo import protocol
from aevo.genesis import Connection, open_transport


@dataclass
class CheckResult:
    passed: bool
    latent_dim: int = 0
    width: int = 0
    height: int = 0
    rounds: int = 0
    failures: list[str] = field(default_factory=list)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"protocol-check {status}: HELLO ({self.latent_dim}, "
                 f"{self.width}x{self.height}), {self.rounds} round trips"]
        lines += [f"  failure: {f}" for f in self.failures]
        return "\n".join(lines)


def check_server(transport_spec: str, rounds: int = 1000, seed: int = 0,
                 timeout: float = 30.0) -> CheckResult:
    result = CheckResult(passed=False)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    try:
        conn = Connection(open_transport(transport_spec, timeout))
    except (protocol.ProtocolError, OSError, ValueError) as exc:
        result.failures.append(f"handshake: {exc}")
        return result
    result.latent_dim, result.width, result.height = conn.latent_dim, conn.width, conn.height

    try:
        for i in range(rounds):
            z = rng.standard_normal(conn.latent_dim)
            img = conn.generate(z)  # validates IMG_RESP payload length
            if i % 2 == 0:
                score = conn.realness(z, img)
                if not math.isfinite(score):
                    result.failures.append(f"round {i}: non-finite DISC_RESP {score}")
                    break
            result.rounds = i + 1
    except protocol.ProtocolError as exc:
        result.failures.append(f"round {result.rounds}: {exc}")
    finally:
        conn.close()
    if result.failures:
        return result

    # A malformed frame must be answered with ERROR (or a close), not data.
    try:
        transport = open_transport(transport_spec, timeout)
        protocol.read_frame(transport.read)  # discard HELLO
        transport.write(b"NOPE" + b"\x00" * 8)
        try:
            frame, _ = protocol.read_frame(transport.read)
            if frame.type is not protocol.FrameType.ERROR:
                result.failures.append(
                    f"malformed frame answered with {frame.type.name}, expected ERROR")
        except protocol.TruncatedFrameError:
            pass  # server closed the connection: acceptable rejection
        transport.close()
    except (protocol.ProtocolError, OSError) as exc:
        result.failures.append(f"malformed-frame probe: {exc}")

    result.passed = not result.failures
    return result

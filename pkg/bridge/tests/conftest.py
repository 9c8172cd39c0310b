import subprocess
import sys

import pytest

from gan_bridge import wire


class ServerProcess:
    """One stdio server subprocess plus helpers to speak frames to it."""

    def __init__(self, argv):
        self.proc = subprocess.Popen([sys.executable, *argv], stdin=subprocess.PIPE,
                                     stdout=subprocess.PIPE)
        self.hello = wire.read_frame(self.proc.stdout.read)

    def send(self, frame: wire.Frame) -> None:
        self.proc.stdin.write(wire.encode(frame))
        self.proc.stdin.flush()

    def send_raw(self, data: bytes) -> None:
        self.proc.stdin.write(data)
        self.proc.stdin.flush()

    def recv(self) -> wire.Frame:
        return wire.read_frame(self.proc.stdout.read)

    def close(self) -> None:
        self.proc.stdin.close()
        self.proc.stdout.close()
        self.proc.wait(timeout=10)


@pytest.fixture
def bridge_server():
    servers = []

    def start(latent_dim=16, width=8, height=8, seed=0, extra=()):
        server = ServerProcess(["-m", "gan_bridge.server",
                                "--latent-dim", str(latent_dim),
                                "--width", str(width), "--height", str(height),
                                "--seed", str(seed), *extra])
        servers.append(server)
        return server

    yield start
    for server in servers:
        try:
            server.close()
        except Exception:
            server.proc.kill()

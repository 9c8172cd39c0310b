"""Echo stub: a minimal in-tree protocol server used by tests and protocol-check.

Answers GEN_REQ with a deterministic built-in image and DISC_REQ with the
Gaussian-shell realness score. Run as ``python -m aevo.stub`` (stdio) or
``python -m aevo.stub --tcp PORT``.
"""

from __future__ import annotations

import argparse
import socket
import sys

import numpy as np

from aevo import protocol
from aevo.genesis import BuiltinEndpoint, EndpointKind, shell_realness


class _PushbackReader:
    """Byte source with one already-read chunk pushed back in front."""

    def __init__(self, read, first: bytes):
        self._read = read
        self._buf = first

    def __call__(self, n: int) -> bytes:
        if self._buf:
            out, self._buf = self._buf[:n], self._buf[n:]
            return out
        return self._read(n)


class StubServer:
    def __init__(self, latent_dim: int = 100, width: int = 128, height: int = 128,
                 seed: int = 0, kind: str = "builtin-linear"):
        self.endpoint = BuiltinEndpoint(kind=EndpointKind(kind), latent_dim=latent_dim,
                                        image_size=(width, height), seed=seed)

    def serve_stream(self, read, write) -> None:
        """Serve one connection until EOF or a malformed frame."""
        ep = self.endpoint
        w, h = ep.image_size
        write(protocol.encode_frame(protocol.pack_hello(ep.latent_dim, w, h)))
        offset = 0
        while True:
            first = read(1)
            if not first:
                return
            try:
                frame, offset = protocol.read_frame(_PushbackReader(read, first), offset)
                response = self._handle(frame)
            except protocol.ProtocolError as exc:
                try:
                    write(protocol.encode_frame(protocol.pack_error(str(exc))))
                except OSError:
                    pass
                return
            write(protocol.encode_frame(response))

    def _handle(self, frame: protocol.Frame) -> protocol.Frame:
        ep = self.endpoint
        w, h = ep.image_size
        if frame.type is protocol.FrameType.GEN_REQ:
            z = protocol.unpack_latent(frame.payload, ep.latent_dim)
            return protocol.pack_img_resp(ep.generate(z).pixels)
        if frame.type is protocol.FrameType.DISC_REQ:
            z, _ = protocol.unpack_disc_req(frame, ep.latent_dim, w, h)
            return protocol.pack_disc_resp(np.float32(shell_realness(z)))
        raise protocol.FramePayloadError(f"unexpected request type {frame.type.name}")


def serve_stdio(server: StubServer) -> None:
    stdin = sys.stdin.buffer
    stdout = sys.stdout.buffer

    def write(data: bytes) -> None:
        stdout.write(data)
        stdout.flush()

    server.serve_stream(stdin.read, write)


def serve_tcp(server: StubServer, port: int, max_connections: int | None = None) -> None:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind(("127.0.0.1", port))
        sock.listen(1)
        print(f"listening on {sock.getsockname()[1]}", file=sys.stderr, flush=True)
        served = 0
        while max_connections is None or served < max_connections:
            conn, _ = sock.accept()
            with conn:
                file = conn.makefile("rwb")
                def write(data: bytes) -> None:
                    file.write(data)
                    file.flush()
                server.serve_stream(file.read, write)
            served += 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="protocol echo stub server")
    parser.add_argument("--tcp", type=int, metavar="PORT", help="serve TCP instead of stdio")
    parser.add_argument("--latent-dim", type=int, default=100)
    parser.add_argument("--width", type=int, default=128)
    parser.add_argument("--height", type=int, default=128)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--kind", default="builtin-linear",
                        choices=["builtin-linear", "builtin-coherent"])
    args = parser.parse_args(argv)
    server = StubServer(args.latent_dim, args.width, args.height, args.seed, args.kind)
    if args.tcp is not None:
        serve_tcp(server, args.tcp)
    else:
        serve_stdio(server)
    return 0


if __name__ == "__main__":
    sys.exit(main())

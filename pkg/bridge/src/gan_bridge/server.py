"""Single-connection wire-protocol server.

Serves one client at a time; run one process per connection for pools. On
connect the server advertises its dimensions with HELLO, then answers GEN_REQ
and DISC_REQ until EOF. Malformed input is answered with an ERROR frame and
the connection is closed.
"""

from __future__ import annotations

import argparse
import socket
import struct
import sys
from dataclasses import dataclass

import numpy as np

from gan_bridge import wire
from gan_bridge.model import CheckpointModel, ModelError, ProceduralModel


@dataclass(frozen=True)
class ServerConfig:
    latent_dim: int = 100
    width: int = 128
    height: int = 128
    seed: int = 0
    checkpoint: str | None = None
    output_range: str = "tanh"
    tcp_port: int | None = None

    def build_model(self):
        if self.checkpoint is not None:
            return CheckpointModel(self.checkpoint, self.latent_dim,
                                   self.width, self.height, self.output_range)
        return ProceduralModel(self.latent_dim, self.width, self.height, self.seed)


def to_rgb8(values: np.ndarray, output_range: str) -> np.ndarray:
    """Map model output to RGB8: round(255·(x+1)/2) for tanh, round(255·x) for sigmoid."""
    if output_range == "tanh":
        scaled = 255.0 * (values + 1.0) / 2.0
    elif output_range == "sigmoid":
        scaled = 255.0 * values
    else:
        raise ValueError(f"unknown output range {output_range!r}")
    return np.clip(np.round(scaled), 0, 255).astype(np.uint8)


def _decode_latent(payload: bytes, latent_dim: int) -> np.ndarray:
    if len(payload) != 4 * latent_dim:
        raise wire.WireError(
            f"latent payload of {len(payload)} bytes, expected {4 * latent_dim}")
    return np.frombuffer(payload, dtype="<f4").astype(np.float64)


def serve_stream(model, read, write) -> None:
    """Answer requests on one byte stream until EOF or a malformed frame."""
    write(wire.encode(wire.hello_frame(model.latent_dim, model.width, model.height)))
    image_bytes = model.width * model.height * 3
    try:
        while True:
            try:
                frame = wire.read_frame(read)
            except wire.ConnectionClosed:
                return
            if frame.type is wire.FrameType.GEN_REQ:
                z = _decode_latent(frame.payload, model.latent_dim)
                rgb = to_rgb8(model.generate(z), model.output_range)
                write(wire.encode(wire.Frame(wire.FrameType.IMG_RESP, rgb.tobytes())))
            elif frame.type is wire.FrameType.DISC_REQ:
                expected = 4 * model.latent_dim + image_bytes
                if len(frame.payload) != expected:
                    raise wire.WireError(
                        f"DISC_REQ payload of {len(frame.payload)} bytes, expected {expected}")
                z = _decode_latent(frame.payload[:4 * model.latent_dim], model.latent_dim)
                rgb = np.frombuffer(frame.payload[4 * model.latent_dim:], dtype=np.uint8)
                rgb = rgb.reshape(model.height, model.width, 3)
                score = model.discriminate(z, rgb)
                payload = wire.DISC_RESP_PAYLOAD.pack(score)
                write(wire.encode(wire.Frame(wire.FrameType.DISC_RESP, payload)))
            else:
                raise wire.WireError(f"unexpected {frame.type.name} from client")
    except (wire.WireError, struct.error) as exc:
        try:
            write(wire.encode(wire.error_frame(str(exc))))
        except OSError:
            pass


def serve_stdio(config: ServerConfig) -> None:
    model = config.build_model()
    stdin = sys.stdin.buffer
    stdout = sys.stdout.buffer

    def write(data: bytes) -> None:
        stdout.write(data)
        stdout.flush()

    serve_stream(model, stdin.read1 if hasattr(stdin, "read1") else stdin.read, write)


def serve_tcp(config: ServerConfig, max_connections: int | None = None) -> None:
    model = config.build_model()
    served = 0
    with socket.create_server(("127.0.0.1", config.tcp_port)) as listener:
        while max_connections is None or served < max_connections:
            conn, _ = listener.accept()
            with conn:
                sock_file = conn.makefile("rb")
                serve_stream(model, sock_file.read1, conn.sendall)
            served += 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gan-bridge",
        description="Serve a generator/discriminator over the latent-evolution "
                    "wire protocol (stdio by default).")
    parser.add_argument("--tcp", type=int, metavar="PORT",
                        help="listen on 127.0.0.1:PORT instead of stdio")
    parser.add_argument("--latent-dim", type=int, default=100)
    parser.add_argument("--width", type=int, default=128)
    parser.add_argument("--height", type=int, default=128)
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the procedural fallback model")
    parser.add_argument("--checkpoint", help="TorchScript generator checkpoint; "
                                             "omit for the procedural fallback")
    parser.add_argument("--output-range", choices=("tanh", "sigmoid"), default="tanh")
    args = parser.parse_args(argv)

    config = ServerConfig(latent_dim=args.latent_dim, width=args.width,
                          height=args.height, seed=args.seed,
                          checkpoint=args.checkpoint,
                          output_range=args.output_range, tcp_port=args.tcp)
    try:
        if args.tcp is not None:
            serve_tcp(config)
        else:
            serve_stdio(config)
    except ModelError as exc:
        print(f"gan-bridge: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main())

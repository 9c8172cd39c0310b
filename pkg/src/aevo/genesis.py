"""Generator/discriminator endpoints.

Two built-in procedural generators give desk-scale experiments something to
search: a high-frequency linear-tanh decoder and a spatially coherent variant
decoded at 16x16 and bilinearly upsampled. Real trained networks attach
through the wire protocol as external endpoints (stdio subprocess or TCP).

Built-in realness is the distance of ``z`` from the Gaussian typical shell:
|‖z‖/sqrt(n) − 1|, zero (most real) exactly on the shell.
"""

from __future__ import annotations

import enum
import math
import shlex
import socket
import subprocess
from dataclasses import dataclass

import numpy as np

from aevo import protocol
from aevo.imagecore import Image

COHERENT_BASE = 16  # decode resolution before bilinear upsampling


class EndpointKind(str, enum.Enum):
    BUILTIN_LINEAR = "builtin-linear"
    BUILTIN_COHERENT = "builtin-coherent"
    EXTERNAL = "external"


class EndpointError(RuntimeError):
    pass


def shell_realness(z: np.ndarray) -> float:
    """|‖z‖₂/sqrt(n) − 1|: zero on the typical shell of a standard normal."""
    n = len(z)
    return abs(float(np.linalg.norm(z)) / math.sqrt(n) - 1.0)


def _bilinear_upsample(plane: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Corner-aligned bilinear interpolation of an (h, w, c) array."""
    h, w = plane.shape[:2]
    ys = np.linspace(0.0, h - 1.0, out_h)
    xs = np.linspace(0.0, w - 1.0, out_w)
    y0 = np.clip(np.floor(ys).astype(int), 0, h - 2)
    x0 = np.clip(np.floor(xs).astype(int), 0, w - 2)
    fy = (ys - y0)[:, None, None]
    fx = (xs - x0)[None, :, None]
    a = plane[y0][:, x0]
    b = plane[y0][:, x0 + 1]
    c = plane[y0 + 1][:, x0]
    d = plane[y0 + 1][:, x0 + 1]
    return (a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx
            + c * fy * (1 - fx) + d * fy * fx)


@dataclass(frozen=True)
class BuiltinEndpoint:
    """Procedural generator: pixels = 0.5 (1 + tanh(W z / sqrt(n) + b)).

    Fully determined by (kind, seed, latent_dim, image_size) — W and b are
    drawn once from the seed. The coherent kind decodes at 16x16 and
    upsamples, which suppresses high-frequency gradients.
    """

    kind: EndpointKind = EndpointKind.BUILTIN_LINEAR
    latent_dim: int = 100
    image_size: tuple[int, int] = (128, 128)  # (width, height)
    seed: int = 0

    def __post_init__(self):
        kind = EndpointKind(self.kind)
        if kind is EndpointKind.EXTERNAL:
            raise ValueError("use ExternalEndpoint for the external kind")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "image_size", tuple(self.image_size))
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        if min(self.image_size) < 2:
            raise ValueError("image size must be at least 2x2")
        w, h = self.image_size
        if self.kind is EndpointKind.BUILTIN_COHERENT:
            dec_w, dec_h = min(COHERENT_BASE, w), min(COHERENT_BASE, h)
        else:
            dec_w, dec_h = w, h
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([0xAE70, self.seed, self.latent_dim, w, h])))
        weight = rng.standard_normal((dec_h * dec_w * 3, self.latent_dim))
        bias = rng.standard_normal(dec_h * dec_w * 3)
        object.__setattr__(self, "_weight", weight)
        object.__setattr__(self, "_bias", bias)
        object.__setattr__(self, "_decode_size", (dec_w, dec_h))

    def generate(self, z: np.ndarray) -> Image:
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.latent_dim,):
            raise EndpointError(f"latent vector of shape {z.shape}, expected ({self.latent_dim},)")
        pre = self._weight @ z / math.sqrt(self.latent_dim) + self._bias
        values = 0.5 * (1.0 + np.tanh(pre))
        dec_w, dec_h = self._decode_size
        plane = values.reshape(dec_h, dec_w, 3)
        w, h = self.image_size
        if (dec_w, dec_h) != (w, h):
            plane = _bilinear_upsample(plane, h, w)
        return Image.from_float(plane)

    def realness(self, z: np.ndarray, img: Image | None = None) -> float:
        return shell_realness(np.asarray(z, dtype=np.float64))


# -- external endpoints -------------------------------------------------------

class _StdioTransport:
    def __init__(self, command: str):
        self.proc = subprocess.Popen(
            shlex.split(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE)

    def read(self, n: int) -> bytes:
        return self.proc.stdout.read(n)

    def write(self, data: bytes) -> None:
        self.proc.stdin.write(data)
        self.proc.stdin.flush()

    def close(self) -> None:
        for stream in (self.proc.stdin, self.proc.stdout):
            try:
                stream.close()
            except OSError:
                pass
        self.proc.terminate()
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()


class _TcpTransport:
    def __init__(self, host: str, port: int, timeout: float):
        self.sock = socket.create_connection((host, port), timeout=timeout)

    def read(self, n: int) -> bytes:
        try:
            return self.sock.recv(n)
        except socket.timeout as exc:
            raise protocol.ProtocolTimeoutError(str(exc)) from exc

    def write(self, data: bytes) -> None:
        self.sock.sendall(data)

    def close(self) -> None:
        self.sock.close()


def open_transport(spec: str, timeout: float = 30.0):
    """Transport spec: ``stdio:<command>`` or ``tcp:<host>:<port>``."""
    if spec.startswith("stdio:"):
        return _StdioTransport(spec[len("stdio:"):])
    if spec.startswith("tcp:"):
        host, _, port = spec[len("tcp:"):].rpartition(":")
        return _TcpTransport(host, int(port), timeout)
    raise ValueError(f"unknown transport spec {spec!r}")


class Connection:
    """One protocol connection; strictly one request in flight."""

    def __init__(self, transport):
        self.transport = transport
        self.offset = 0
        self.dead = False
        frame, self.offset = protocol.read_frame(transport.read, self.offset)
        self.latent_dim, self.width, self.height = protocol.unpack_hello(frame)

    def roundtrip(self, frame: protocol.Frame) -> protocol.Frame:
        if self.dead:
            raise protocol.ProtocolError("connection marked dead after a previous error")
        try:
            self.transport.write(protocol.encode_frame(frame))
            response, self.offset = protocol.read_frame(self.transport.read, self.offset)
        except protocol.ProtocolError:
            self.dead = True
            raise
        if response.type is protocol.FrameType.ERROR:
            self.dead = True
            raise protocol.RemoteError(protocol.unpack_error(response))
        return response

    def generate(self, z: np.ndarray) -> np.ndarray:
        resp = self.roundtrip(protocol.pack_gen_req(z))
        try:
            return protocol.unpack_img_resp(resp, self.width, self.height)
        except protocol.FramePayloadError:
            self.dead = True
            raise

    def realness(self, z: np.ndarray, rgb: np.ndarray) -> float:
        resp = self.roundtrip(protocol.pack_disc_req(z, rgb))
        try:
            return protocol.unpack_disc_resp(resp)
        except protocol.FramePayloadError:
            self.dead = True
            raise

    def close(self) -> None:
        self.transport.close()


class ExternalEndpoint:
    """Generator/discriminator behind the wire protocol.

    Dimensions come from the server's HELLO. The connection is lazy; failed
    connections are replaced on the next call.
    """

    kind = EndpointKind.EXTERNAL

    def __init__(self, transport_spec: str, timeout: float = 30.0):
        self.transport_spec = transport_spec
        self.timeout = timeout
        self._conn: Connection | None = None
        conn = self._connection()
        self.latent_dim = conn.latent_dim
        self.image_size = (conn.width, conn.height)

    def _connection(self) -> Connection:
        if self._conn is None or self._conn.dead:
            if self._conn is not None:
                self._conn.close()
            self._conn = Connection(open_transport(self.transport_spec, self.timeout))
        return self._conn

    def generate(self, z: np.ndarray) -> Image:
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.latent_dim,):
            raise EndpointError(f"latent vector of shape {z.shape}, expected ({self.latent_dim},)")
        return Image(self._connection().generate(z))

    def realness(self, z: np.ndarray, img: Image) -> float:
        return self._connection().realness(np.asarray(z, dtype=np.float64), img.pixels)

    def close(self) -> None:
        if self._conn is not None:
            self._conn.close()
            self._conn = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def endpoint_from_config(cfg: dict):
    """Build an endpoint from its JSON config object."""
    kind = EndpointKind(cfg.get("kind", "builtin-linear"))
    if kind is EndpointKind.EXTERNAL:
        return ExternalEndpoint(cfg["transport"], timeout=cfg.get("timeout", 30.0))
    return BuiltinEndpoint(
        kind=kind,
        latent_dim=cfg.get("latent_dim", 100),
        image_size=tuple(cfg.get("image_size", (128, 128))),
        seed=cfg.get("seed", 0),
    )

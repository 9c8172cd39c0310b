"""Length-prefixed binary framing for external generator processes.

Frame layout, all integers little-endian:

    magic "AEVO" | version u16 = 1 | type u16 | payload_len u32 | payload

Types: HELLO=1 (latent_dim u32, width u32, height u32; server sends it on
connect), GEN_REQ=2 (latent_dim f32s), IMG_RESP=3 (width*height*3 RGB8
row-major), DISC_REQ=4 (latent f32s then RGB8 image), DISC_RESP=5 (one f32),
ERROR=6 (UTF-8 message). One request in flight per connection.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"AEVO"
VERSION = 1
HEADER = struct.Struct("<4sHHI")
MAX_PAYLOAD = 64 * 1024 * 1024


class FrameType(enum.IntEnum):
    HELLO = 1
    GEN_REQ = 2
    IMG_RESP = 3
    DISC_REQ = 4
    DISC_RESP = 5
    ERROR = 6


class ProtocolError(Exception):
    pass


class BadMagicError(ProtocolError):
    def __init__(self, got: bytes, offset: int):
        super().__init__(f"bad frame magic {got!r} at byte offset {offset}")
        self.offset = offset


class VersionMismatchError(ProtocolError):
    def __init__(self, got: int, offset: int):
        super().__init__(f"protocol version {got}, expected {VERSION}, at byte offset {offset}")
        self.offset = offset


class TruncatedFrameError(ProtocolError):
    def __init__(self, expected: int, got: int, offset: int):
        super().__init__(
            f"truncated frame: wanted {expected} bytes, got {got}, at byte offset {offset}")
        self.offset = offset


class RemoteError(ProtocolError):
    def __init__(self, message: str):
        super().__init__(f"remote ERROR frame: {message}")
        self.remote_message = message


class ProtocolTimeoutError(ProtocolError):
    pass


class FramePayloadError(ProtocolError):
    """Payload length or content inconsistent with the negotiated dimensions."""


@dataclass(frozen=True)
class Frame:
    type: FrameType
    payload: bytes


def encode_frame(frame: Frame) -> bytes:
    if len(frame.payload) > MAX_PAYLOAD:
        raise FramePayloadError(f"payload of {len(frame.payload)} bytes exceeds limit")
    return HEADER.pack(MAGIC, VERSION, int(frame.type), len(frame.payload)) + frame.payload


def decode_frame(data: bytes, offset: int = 0) -> tuple[Frame, int]:
    """Decode one frame starting at ``offset``; returns (frame, next offset)."""
    if len(data) - offset < HEADER.size:
        raise TruncatedFrameError(HEADER.size, len(data) - offset, offset)
    magic, version, ftype, plen = HEADER.unpack_from(data, offset)
    if magic != MAGIC:
        raise BadMagicError(magic, offset)
    if version != VERSION:
        raise VersionMismatchError(version, offset + 4)
    if plen > MAX_PAYLOAD:
        raise FramePayloadError(f"declared payload of {plen} bytes exceeds limit")
    body_start = offset + HEADER.size
    if len(data) - body_start < plen:
        raise TruncatedFrameError(plen, len(data) - body_start, body_start)
    try:
        ft = FrameType(ftype)
    except ValueError:
        raise FramePayloadError(f"unknown frame type {ftype}") from None
    return Frame(ft, data[body_start:body_start + plen]), body_start + plen


# -- typed payload helpers ---------------------------------------------------

def pack_hello(latent_dim: int, width: int, height: int) -> Frame:
    return Frame(FrameType.HELLO, struct.pack("<III", latent_dim, width, height))


def unpack_hello(frame: Frame) -> tuple[int, int, int]:
    if frame.type is not FrameType.HELLO or len(frame.payload) != 12:
        raise FramePayloadError(f"not a valid HELLO frame ({frame.type}, {len(frame.payload)}B)")
    return struct.unpack("<III", frame.payload)


def pack_latent(z) -> bytes:
    return np.asarray(z, dtype="<f4").tobytes()


def unpack_latent(payload: bytes, latent_dim: int) -> np.ndarray:
    if len(payload) != 4 * latent_dim:
        raise FramePayloadError(
            f"latent payload of {len(payload)} bytes, expected {4 * latent_dim}")
    return np.frombuffer(payload, dtype="<f4").astype(np.float64)


def pack_gen_req(z) -> Frame:
    return Frame(FrameType.GEN_REQ, pack_latent(z))


def pack_img_resp(rgb: np.ndarray) -> Frame:
    return Frame(FrameType.IMG_RESP, np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def unpack_img_resp(frame: Frame, width: int, height: int) -> np.ndarray:
    expected = width * height * 3
    if frame.type is not FrameType.IMG_RESP:
        raise FramePayloadError(f"expected IMG_RESP, got {frame.type.name}")
    if len(frame.payload) != expected:
        raise FramePayloadError(
            f"IMG_RESP payload of {len(frame.payload)} bytes, expected {expected}")
    return np.frombuffer(frame.payload, dtype=np.uint8).reshape(height, width, 3)


def pack_disc_req(z, rgb: np.ndarray) -> Frame:
    return Frame(FrameType.DISC_REQ,
                 pack_latent(z) + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def unpack_disc_req(frame: Frame, latent_dim: int, width: int,
                    height: int) -> tuple[np.ndarray, np.ndarray]:
    expected = 4 * latent_dim + width * height * 3
    if len(frame.payload) != expected:
        raise FramePayloadError(
            f"DISC_REQ payload of {len(frame.payload)} bytes, expected {expected}")
    z = unpack_latent(frame.payload[:4 * latent_dim], latent_dim)
    img = np.frombuffer(frame.payload[4 * latent_dim:], dtype=np.uint8)
    return z, img.reshape(height, width, 3)


def pack_disc_resp(score: float) -> Frame:
    return Frame(FrameType.DISC_RESP, struct.pack("<f", score))


def unpack_disc_resp(frame: Frame) -> float:
    if frame.type is not FrameType.DISC_RESP or len(frame.payload) != 4:
        raise FramePayloadError(
            f"not a valid DISC_RESP frame ({frame.type}, {len(frame.payload)}B)")
    return struct.unpack("<f", frame.payload)[0]


def pack_error(message: str) -> Frame:
    return Frame(FrameType.ERROR, message.encode("utf-8"))


def unpack_error(frame: Frame) -> str:
    return frame.payload.decode("utf-8", errors="replace")


# -- blocking frame I/O over a byte stream -----------------------------------

def read_exact(read, n: int, offset: int) -> bytes:
    """Read exactly n bytes via read(k); raises on EOF mid-frame."""
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = read(remaining)
        if not chunk:
            raise TruncatedFrameError(n, n - remaining, offset + (n - remaining))
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(read, offset: int = 0) -> tuple[Frame, int]:
    """Read one frame from a blocking byte source; returns (frame, next offset)."""
    header = read_exact(read, HEADER.size, offset)
    magic, version, ftype, plen = HEADER.unpack(header)
    if magic != MAGIC:
        raise BadMagicError(magic, offset)
    if version != VERSION:
        raise VersionMismatchError(version, offset + 4)
    if plen > MAX_PAYLOAD:
        raise FramePayloadError(f"declared payload of {plen} bytes exceeds limit")
    payload = read_exact(read, plen, offset + HEADER.size)
    try:
        ft = FrameType(ftype)
    except ValueError:
        raise FramePayloadError(f"unknown frame type {ftype}") from None
    return Frame(ft, payload), offset + HEADER.size + plen

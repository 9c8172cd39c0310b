"""Framing for the latent-evolution wire protocol, server side.

Every frame is ``magic "AEVO" | version u16 = 1 | type u16 | payload_len u32``
followed by the payload; all integers little-endian. The server emits HELLO
(latent_dim u32, width u32, height u32) on connect, then answers one request
at a time: GEN_REQ (latent as f32s) with IMG_RESP (RGB8 row-major) and
DISC_REQ (latent f32s then RGB8) with DISC_RESP (one f32). Anything the
server cannot parse is answered with an ERROR frame (UTF-8 message) and the
connection is closed.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

MAGIC = b"AEVO"
VERSION = 1
HEADER = struct.Struct("<4sHHI")
MAX_PAYLOAD = 64 * 1024 * 1024

HELLO_PAYLOAD = struct.Struct("<III")
DISC_RESP_PAYLOAD = struct.Struct("<f")


class FrameType(enum.IntEnum):
    HELLO = 1
    GEN_REQ = 2
    IMG_RESP = 3
    DISC_REQ = 4
    DISC_RESP = 5
    ERROR = 6


class WireError(Exception):
    """Any framing violation: bad magic, bad version, bad length, bad type."""


class ConnectionClosed(Exception):
    """The peer closed the stream at a frame boundary."""


@dataclass(frozen=True)
class Frame:
    type: FrameType
    payload: bytes


def encode(frame: Frame) -> bytes:
    return HEADER.pack(MAGIC, VERSION, int(frame.type), len(frame.payload)) + frame.payload


def _read_exact(read, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = read(remaining)
        if not chunk:
            raise WireError(f"stream ended {remaining} bytes short of a frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(read) -> Frame:
    """Read one frame from a blocking byte source.

    Raises ConnectionClosed on EOF at a frame boundary and WireError on any
    malformed header or truncated payload.
    """
    first = read(1)
    if not first:
        raise ConnectionClosed()
    header = first + _read_exact(read, HEADER.size - 1)
    magic, version, ftype, plen = HEADER.unpack(header)
    if magic != MAGIC:
        raise WireError(f"bad frame magic {magic!r}")
    if version != VERSION:
        raise WireError(f"unsupported protocol version {version}")
    if plen > MAX_PAYLOAD:
        raise WireError(f"declared payload of {plen} bytes exceeds limit")
    payload = _read_exact(read, plen)
    try:
        frame_type = FrameType(ftype)
    except ValueError:
        raise WireError(f"unknown frame type {ftype}") from None
    return Frame(frame_type, payload)


def hello_frame(latent_dim: int, width: int, height: int) -> Frame:
    return Frame(FrameType.HELLO, HELLO_PAYLOAD.pack(latent_dim, width, height))


def error_frame(message: str) -> Frame:
    return Frame(FrameType.ERROR, message.encode("utf-8"))

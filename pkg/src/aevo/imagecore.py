"""Raster core: the Image type, color conversion, luminance, superpixels, PPM I/O.

Pixels are stored 8-bit and exposed to the metrics as reals in [0, 1]
(division by 255), so a PPM round trip is exact and every measure sees
the same values an external generator transmitted.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class PpmParseError(ValueError):
    """Malformed PPM input; ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class HsvTriple(NamedTuple):
    h: float
    s: float
    v: float


@dataclass(frozen=True)
class Image:
    """Fixed-size RGB raster, row-major uint8, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) array, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def as_float(self) -> np.ndarray:
        """Channel values as float64 in [0, 1]."""
        return self.pixels.astype(np.float64) / 255.0

    @staticmethod
    def from_float(values: np.ndarray) -> "Image":
        """Quantize a float array in [0, 1] to 8-bit storage."""
        v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
        return Image(np.round(v * 255.0).astype(np.uint8))

    def __eq__(self, other) -> bool:
        return isinstance(other, Image) and np.array_equal(self.pixels, other.pixels)


def rgb_to_hsv(r: float, g: float, b: float) -> HsvTriple:
    """Standard hexcone HSV; hue wrapped into [0, 1), achromatic hue is 0."""
    v = max(r, g, b)
    mn = min(r, g, b)
    c = v - mn
    if c == 0.0:
        return HsvTriple(0.0, 0.0, v)
    if v == r:
        h = ((g - b) / c) % 6.0
    elif v == g:
        h = (b - r) / c + 2.0
    else:
        h = (r - g) / c + 4.0
    h /= 6.0
    s = 0.0 if v == 0.0 else c / v
    return HsvTriple(h % 1.0, s, v)


def hsv_planes(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized hue/saturation/value planes for a float (H, W, 3) array."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    c = v - mn
    chromatic = c > 0.0
    safe_c = np.where(chromatic, c, 1.0)
    h = np.zeros_like(v)
    is_r = chromatic & (v == r)
    is_g = chromatic & ~is_r & (v == g)
    is_b = chromatic & ~is_r & ~is_g
    h = np.where(is_r, ((g - b) / safe_c) % 6.0, h)
    h = np.where(is_g, (b - r) / safe_c + 2.0, h)
    h = np.where(is_b, (r - g) / safe_c + 4.0, h)
    h = (h / 6.0) % 1.0
    h = np.where(chromatic, h, 0.0)
    s = np.where(v > 0.0, c / np.where(v > 0.0, v, 1.0), 0.0)
    return h, s, v


def perceptual_luminance(r, g, b):
    """L = sqrt(0.2126 r^2.2 + 0.7152 g^2.2 + 0.0722 b^2.2); accepts scalars or arrays."""
    lin = 0.2126 * np.power(r, 2.2) + 0.7152 * np.power(g, 2.2) + 0.0722 * np.power(b, 2.2)
    return np.sqrt(lin)


@dataclass(frozen=True)
class LuminanceGrid:
    """Superpixel luminance plane, shape (height, width), values in [0, 1]."""

    values: np.ndarray

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def luminance_plane(img: Image) -> np.ndarray:
    f = img.as_float()
    return perceptual_luminance(f[..., 0], f[..., 1], f[..., 2])


def superpixel_downsample(img: Image, size: int) -> LuminanceGrid:
    """Average perceptual luminance over size x size blocks.

    Edge blocks cover only the pixels that exist (no padding); a size at or
    above both image dimensions degenerates to the 1x1 whole-image mean.
    """
    if size < 1:
        raise ValueError("superpixel size must be >= 1")
    lum = luminance_plane(img)
    h, w = lum.shape
    if size == 1:
        return LuminanceGrid(lum)
    row_idx = np.arange(0, h, size)
    col_idx = np.arange(0, w, size)
    sums = np.add.reduceat(np.add.reduceat(lum, row_idx, axis=0), col_idx, axis=1)
    row_counts = np.minimum(row_idx + size, h) - row_idx
    col_counts = np.minimum(col_idx + size, w) - col_idx
    counts = np.outer(row_counts, col_counts)
    return LuminanceGrid(sums / counts)


def write_ppm(img: Image, path) -> None:
    """Binary PPM (P6, maxval 255); write is atomic (temp file + rename)."""
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    payload = img.pixels.tobytes()
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".ppm.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _skip_ppm_whitespace(data: bytes, pos: int) -> int:
    while pos < len(data):
        ch = data[pos:pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
        else:
            break
    return pos


def _read_ppm_token(data: bytes, pos: int, what: str) -> tuple[bytes, int]:
    pos = _skip_ppm_whitespace(data, pos)
    start = pos
    while pos < len(data) and not data[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PpmParseError(f"missing {what}", start)
    return data[start:pos], pos


def read_ppm(path) -> Image:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P6":
        raise PpmParseError("bad magic, expected 'P6'", 0)
    pos = 2
    fields = []
    for what in ("width", "height", "maxval"):
        token, pos = _read_ppm_token(data, pos, what)
        try:
            value = int(token)
        except ValueError:
            raise PpmParseError(f"non-numeric {what} {token!r}", pos - len(token)) from None
        fields.append((what, value, pos - len(token)))
    (_, width, woff), (_, height, hoff), (_, maxval, moff) = fields
    if width < 1:
        raise PpmParseError(f"invalid width {width}", woff)
    if height < 1:
        raise PpmParseError(f"invalid height {height}", hoff)
    if maxval != 255:
        raise PpmParseError(f"unsupported maxval {maxval}, only 255", moff)
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise PpmParseError("missing single whitespace after maxval", pos)
    pos += 1
    expected = width * height * 3
    payload = data[pos:pos + expected]
    if len(payload) < expected:
        raise PpmParseError(
            f"truncated payload, expected {expected} bytes, got {len(payload)}",
            pos + len(payload),
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
    return Image(pixels)

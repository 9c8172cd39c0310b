"""The five aesthetic feature measures, each a pure function Image -> scalar.

Mean hue, mean saturation, smoothness and reflectional symmetry are bounded
to [0, 1]; the global contrast factor is nonnegative and unbounded above.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from aevo.imagecore import Image, LuminanceGrid, hsv_planes, superpixel_downsample

# Superpixel edge lengths for the 9-resolution contrast pyramid.
GCF_SUPERPIXEL_SIZES = (1, 2, 4, 8, 16, 25, 50, 100, 200)


class FeatureId(str, enum.Enum):
    HUE = "hue"
    SATURATION = "saturation"
    SMOOTHNESS = "smoothness"
    SYMMETRY = "symmetry"
    GCF = "gcf"


@dataclass(frozen=True)
class FeatureValue:
    feature: FeatureId
    value: float


def mean_hue(img: Image) -> float:
    """Arithmetic mean of per-pixel hue; achromatic pixels contribute hue 0.

    Deliberately not a circular mean: 0 and 1 are both red and are averaged
    as-is.
    """
    h, _, _ = hsv_planes(img.as_float())
    return float(h.mean())


def mean_saturation(img: Image) -> float:
    _, s, _ = hsv_planes(img.as_float())
    return float(s.mean())


def smoothness(img: Image) -> float:
    """1 minus the mean normalized gradient magnitude over all channels.

    Intermediate differences per channel, averaged over the forward (zero at
    the last row/column) and backward (zero at the first) orientations; the
    average makes the measure exactly invariant under 180-degree rotation.
    The magnitude is divided by sqrt(2) so the result stays in [0, 1].
    """
    if img.width < 2 or img.height < 2:
        raise ValueError("smoothness requires width and height >= 2")
    f = img.as_float()
    gx = np.zeros_like(f)
    gy = np.zeros_like(f)
    gx[:, :-1, :] = f[:, 1:, :] - f[:, :-1, :]
    gy[:-1, :, :] = f[1:, :, :] - f[:-1, :, :]
    mag_fwd = np.sqrt(gx * gx + gy * gy)
    gx[:] = 0.0
    gy[:] = 0.0
    gx[:, 1:, :] = f[:, 1:, :] - f[:, :-1, :]
    gy[1:, :, :] = f[1:, :, :] - f[:-1, :, :]
    mag_bwd = np.sqrt(gx * gx + gy * gy)
    mag = (mag_fwd + mag_bwd) / (2.0 * np.sqrt(2.0))
    n = img.width * img.height
    return float(1.0 - mag.sum() / (3.0 * n))


def symmetry_components(img: Image) -> tuple[float, float, float]:
    """Horizontal-mirror, vertical-mirror and point-reflection scores."""
    f = img.as_float()
    s_h = 1.0 - np.abs(f - f[:, ::-1, :]).mean()
    s_v = 1.0 - np.abs(f - f[::-1, :, :]).mean()
    s_d = 1.0 - np.abs(f - f[::-1, ::-1, :]).mean()
    return float(s_h), float(s_v), float(s_d)


def reflectional_symmetry(img: Image) -> float:
    """Mean of horizontal-mirror, vertical-mirror and point-reflection scores."""
    s_h, s_v, s_d = symmetry_components(img)
    return (s_h + s_v + s_d) / 3.0


def local_contrast_grid(grid: LuminanceGrid) -> float:
    """Mean over cells of summed |neighbor - self| over existing 4-neighbors."""
    v = grid.values
    lc = np.zeros_like(v)
    d = np.abs(v[:, 1:] - v[:, :-1])
    lc[:, 1:] += d
    lc[:, :-1] += d
    d = np.abs(v[1:, :] - v[:-1, :])
    lc[1:, :] += d
    lc[:-1, :] += d
    return float(lc.mean())


def gcf_weight(r: int) -> float:
    """Resolution weight for r in 1..9; peaks at r = 4 (moderate resolutions)."""
    x = r / 9.0
    return (-0.406385 * x + 0.334573) * x + 0.0877526


def gcf(img: Image) -> float:
    """Weighted sum of mean local contrast over the 9-resolution pyramid."""
    total = 0.0
    for r, size in enumerate(GCF_SUPERPIXEL_SIZES, start=1):
        total += gcf_weight(r) * local_contrast_grid(superpixel_downsample(img, size))
    return total


_MEASURES = {
    FeatureId.HUE: mean_hue,
    FeatureId.SATURATION: mean_saturation,
    FeatureId.SMOOTHNESS: smoothness,
    FeatureId.SYMMETRY: reflectional_symmetry,
    FeatureId.GCF: gcf,
}


def measure(feature: FeatureId, img: Image) -> FeatureValue:
    return FeatureValue(feature, _MEASURES[FeatureId(feature)](img))


def measure_all(img: Image) -> list[FeatureValue]:
    return [measure(fid, img) for fid in FeatureId]

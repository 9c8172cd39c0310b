"""The five aesthetic measures on hand-built images.

Each measure maps an RGB image to a scalar: mean hue, mean saturation,
smoothness, reflectional symmetry, and the global contrast factor (GCF).
This script builds a few images whose values are easy to predict and prints
all five measures for each, then demonstrates two invariances the measures
are designed to satisfy.
"""

import numpy as np

from aevo import Image
from aevo.aesthetics import measure_all

rng = np.random.default_rng(7)


def show(name, img):
    values = ", ".join(f"{v.feature.value}={v.value:.4f}" for v in measure_all(img))
    print(f"{name:<22} {values}")


# A constant image is perfectly smooth and symmetric, with zero contrast.
flat = Image(np.full((32, 32, 3), 180, dtype=np.uint8))
show("constant gray", flat)

# Pure red pixels: hue 0, saturation 1.
red = np.zeros((32, 32, 3), dtype=np.uint8)
red[..., 0] = 255
show("pure red", red := Image(red))

# A fine checkerboard maximizes local contrast and minimizes smoothness.
i, j = np.indices((32, 32))
board = ((i + j) % 2).astype(np.uint8) * 255
show("1px checkerboard", Image(np.repeat(board[..., None], 3, axis=2)))

# Random noise sits in the middle of most ranges.
noise = Image(rng.integers(0, 256, (32, 32, 3), dtype=np.uint8))
show("uniform noise", noise)

print()
print("Invariance checks on the noise image:")

# Rotating an image 180 degrees changes none of the measures.
rotated = Image(np.ascontiguousarray(noise.pixels[::-1, ::-1, :]))
drift = max(abs(a.value - b.value)
            for a, b in zip(measure_all(noise), measure_all(rotated)))
print(f"  180-degree rotation: max measure drift = {drift:.2e}")

# Mirroring one half onto the other yields a perfectly symmetric image.
half = noise.pixels[:, :16, :]
mirrored = Image(np.concatenate([half, half[:, ::-1, :]], axis=1))
symmetry = next(v.value for v in measure_all(mirrored) if v.feature.value == "symmetry")
print(f"  hand-mirrored image: symmetry = {symmetry:.4f}")

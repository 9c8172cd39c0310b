import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from aevo.imagecore import Image


def random_image(rng, width=16, height=16):
    return Image(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def constant_image(r, g, b, width=8, height=8):
    px = np.zeros((height, width, 3), dtype=np.uint8)
    px[..., 0], px[..., 1], px[..., 2] = r, g, b
    return Image(px)


def checkerboard(width=128, height=128, square=8):
    i, j = np.indices((height, width))
    white = ((i // square + j // square) % 2).astype(np.uint8) * 255
    return Image(np.repeat(white[..., None], 3, axis=2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

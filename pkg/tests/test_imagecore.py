import colorsys
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aevo.imagecore import (HsvTriple, Image, PpmParseError, perceptual_luminance,
                            read_ppm, rgb_to_hsv, superpixel_downsample, write_ppm)
from conftest import constant_image, random_image

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestRgbToHsv:
    def test_pure_red(self):
        assert rgb_to_hsv(1, 0, 0) == HsvTriple(0.0, 1.0, 1.0)

    def test_achromatic(self):
        assert rgb_to_hsv(0.5, 0.5, 0.5) == HsvTriple(0.0, 0.0, 0.5)

    def test_pure_green(self):
        # verified against the stdlib reference conversion
        h, s, v = rgb_to_hsv(0, 1, 0)
        assert (h, s, v) == colorsys.rgb_to_hsv(0, 1, 0)
        assert math.isclose(h, 1 / 3)

    @given(unit, unit, unit)
    def test_inverse_roundtrip(self, r, g, b):
        h, s, v = rgb_to_hsv(r, g, b)
        back = colorsys.hsv_to_rgb(h, s, v)
        assert max(abs(a - b_) for a, b_ in zip((r, g, b), back)) <= 1 / 255

    @given(unit, unit, unit)
    def test_ranges(self, r, g, b):
        h, s, v = rgb_to_hsv(r, g, b)
        assert 0 <= h < 1 and 0 <= s <= 1 and 0 <= v <= 1


class TestPerceptualLuminance:
    def test_black_and_white(self):
        assert perceptual_luminance(0, 0, 0) == 0.0
        assert math.isclose(perceptual_luminance(1, 1, 1), 1.0)

    def test_mid_gray(self):
        assert math.isclose(perceptual_luminance(0.5, 0.5, 0.5),
                            math.sqrt(0.5 ** 2.2), rel_tol=1e-12)

    @given(unit, unit)
    def test_monotone_per_channel(self, lo, hi):
        lo, hi = min(lo, hi), max(lo, hi)
        for ch in range(3):
            args_lo = [0.3, 0.3, 0.3]
            args_hi = list(args_lo)
            args_lo[ch], args_hi[ch] = lo, hi
            assert perceptual_luminance(*args_lo) <= perceptual_luminance(*args_hi) + 1e-15


class TestSuperpixelDownsample:
    def test_constant_gray(self):
        img = constant_image(128, 128, 128, width=128, height=128)
        grid = superpixel_downsample(img, 16)
        assert grid.values.shape == (8, 8)
        expected = perceptual_luminance(128 / 255, 128 / 255, 128 / 255)
        assert np.allclose(grid.values, expected, atol=1e-12)

    def test_size_one_is_identity_resolution(self, rng):
        img = random_image(rng)
        grid = superpixel_downsample(img, 1)
        assert grid.values.shape == (img.height, img.width)

    def test_uneven_edges(self, rng):
        img = random_image(rng, width=128, height=128)
        grid = superpixel_downsample(img, 25)
        assert grid.values.shape == (6, 6)
        # last column cells average a 3-pixel-wide strip
        lum = superpixel_downsample(img, 1).values
        assert math.isclose(grid.values[0, 5], lum[0:25, 125:128].mean(), rel_tol=1e-12)

    def test_oversized_superpixel_degenerates(self, rng):
        img = random_image(rng, width=16, height=16)
        grid = superpixel_downsample(img, 200)
        assert grid.values.shape == (1, 1)
        assert math.isclose(grid.values[0, 0],
                            superpixel_downsample(img, 1).values.mean(), rel_tol=1e-12)

    def test_rejects_size_zero(self, rng):
        with pytest.raises(ValueError):
            superpixel_downsample(random_image(rng), 0)

    def test_values_in_unit_interval(self, rng):
        for _ in range(10):
            img = random_image(rng, width=13, height=9)
            for size in (1, 2, 4, 8, 16):
                v = superpixel_downsample(img, size).values
                assert (v >= 0).all() and (v <= 1).all()


class TestPpm:
    def test_round_trip_primaries(self, tmp_path):
        px = np.array([[[255, 0, 0], [0, 255, 0]],
                       [[0, 0, 255], [255, 255, 0]]], dtype=np.uint8)
        img = Image(px)
        path = tmp_path / "t.ppm"
        write_ppm(img, path)
        assert read_ppm(path) == img

    def test_round_trip_random(self, tmp_path, rng):
        img = random_image(rng, width=31, height=17)
        path = tmp_path / "r.ppm"
        write_ppm(img, path)
        assert np.array_equal(read_ppm(path).pixels, img.pixels)

    def test_minimal_wellformed(self, tmp_path):
        path = tmp_path / "m.ppm"
        path.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
        img = read_ppm(path)
        assert (img.width, img.height) == (2, 2)

    def test_comment_in_header(self, tmp_path):
        path = tmp_path / "c.ppm"
        path.write_bytes(b"P6\n# made by hand\n2 1\n255\n" + bytes(6))
        assert read_ppm(path).width == 2

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "t.ppm"
        path.write_bytes(b"P6\n2 2\n255\n" + bytes(11))
        with pytest.raises(PpmParseError) as exc:
            read_ppm(path)
        assert "truncated" in str(exc.value)
        assert exc.value.offset == len(b"P6\n2 2\n255\n") + 11

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "b.ppm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes(12))
        with pytest.raises(PpmParseError) as exc:
            read_ppm(path)
        assert exc.value.offset == 0

    def test_wrong_maxval(self, tmp_path):
        path = tmp_path / "w.ppm"
        path.write_bytes(b"P6\n2 2\n65535\n" + bytes(24))
        with pytest.raises(PpmParseError):
            read_ppm(path)


class TestImage:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Image(np.zeros((4, 4), dtype=np.uint8))

    def test_immutable(self):
        img = constant_image(1, 2, 3)
        with pytest.raises(ValueError):
            img.pixels[0, 0, 0] = 9

    def test_float_quantization_roundtrip(self, rng):
        img = random_image(rng)
        assert Image.from_float(img.as_float()) == img

import math
import sys

import numpy as np
import pytest

from aevo.aesthetics import smoothness
from aevo.genesis import (BuiltinEndpoint, EndpointError, EndpointKind,
                          ExternalEndpoint, endpoint_from_config, shell_realness)

STUB = f"stdio:{sys.executable} -m aevo.stub --latent-dim 20 --width 16 --height 16"


class TestBuiltinGenerate:
    def test_determinism(self, rng):
        ep = BuiltinEndpoint(image_size=(16, 16), seed=4)
        z = rng.standard_normal(100)
        assert ep.generate(z) == ep.generate(z)
        same = BuiltinEndpoint(image_size=(16, 16), seed=4)
        assert same.generate(z) == ep.generate(z)

    def test_zero_vector_uses_bias_only(self):
        ep = BuiltinEndpoint(image_size=(8, 8), seed=4)
        img = ep.generate(np.zeros(100))
        expected = 0.5 * (1.0 + np.tanh(ep._bias)).reshape(8, 8, 3)
        assert np.abs(img.as_float() - expected).max() <= 0.5 / 255 + 1e-12

    def test_dimension_mismatch(self):
        ep = BuiltinEndpoint(latent_dim=10, image_size=(8, 8))
        with pytest.raises(EndpointError):
            ep.generate(np.zeros(9))

    def test_coherent_is_smoother(self, rng):
        lin = BuiltinEndpoint(kind="builtin-linear", image_size=(32, 32), seed=9)
        coh = BuiltinEndpoint(kind="builtin-coherent", image_size=(32, 32), seed=9)
        wins = 0
        for _ in range(100):
            z = rng.standard_normal(100)
            if smoothness(coh.generate(z)) > smoothness(lin.generate(z)):
                wins += 1
        assert wins >= 95

    def test_image_size_respected(self):
        ep = BuiltinEndpoint(kind="builtin-coherent", image_size=(48, 24), seed=1)
        img = ep.generate(np.zeros(100))
        assert (img.width, img.height) == (48, 24)


class TestBuiltinRealness:
    def test_zero_on_shell(self):
        ep = BuiltinEndpoint(latent_dim=16, image_size=(8, 8))
        z = np.ones(16)  # norm = 4 = sqrt(16)
        assert ep.realness(z) == 0.0

    def test_origin_scores_one(self):
        ep = BuiltinEndpoint(latent_dim=16, image_size=(8, 8))
        assert ep.realness(np.zeros(16)) == 1.0

    def test_outside_shell(self):
        z = np.ones(16) * 1.5
        assert math.isclose(shell_realness(z), 0.5, rel_tol=1e-12)

    def test_continuous_near_shell(self, rng):
        z = rng.standard_normal(64)
        base = shell_realness(z)
        assert abs(shell_realness(z * 1.0001) - base) < 1e-3


class TestEndpointConfig:
    def test_builtin_from_config(self):
        ep = endpoint_from_config({"kind": "builtin-coherent", "latent_dim": 12,
                                   "image_size": [8, 8], "seed": 3})
        assert ep.kind is EndpointKind.BUILTIN_COHERENT
        assert ep.latent_dim == 12

    def test_rejects_tiny_images(self):
        with pytest.raises(ValueError):
            BuiltinEndpoint(image_size=(1, 8))


class TestExternalEndpoint:
    def test_stub_round_trip(self, rng):
        with ExternalEndpoint(STUB) as ep:
            assert ep.latent_dim == 20
            assert ep.image_size == (16, 16)
            z = rng.standard_normal(20)
            img = ep.generate(z)
            assert (img.width, img.height) == (16, 16)
            assert ep.generate(z) == img
            score = ep.realness(z, img)
            assert math.isclose(score, shell_realness(z), abs_tol=1e-6)

    def test_dimension_mismatch(self):
        with ExternalEndpoint(STUB) as ep:
            with pytest.raises(EndpointError):
                ep.generate(np.zeros(21))

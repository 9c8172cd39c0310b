"""Model backends: a trained checkpoint wrapper and a procedural fallback.

Both expose ``generate(z) -> float array (height, width, 3)`` in the model's
output range and ``discriminate(z, rgb) -> float`` normalized so 0 means most
real. The fallback discriminator scores distance from the typical shell of a
standard normal latent, |‖z‖₂/√n − 1|, rounded to f32 so every server
implementation of the same formula reports bit-identical scores.
"""

from __future__ import annotations

import math

import numpy as np


class ModelError(Exception):
    """A checkpoint could not be loaded or returned malformed output."""


def shell_score(z: np.ndarray) -> float:
    """|‖z‖₂/√n − 1| at f32 precision."""
    n = len(z)
    return float(np.float32(abs(float(np.linalg.norm(z)) / math.sqrt(n) - 1.0)))


class ProceduralModel:
    """Deterministic stand-in generator: tanh of a fixed random projection.

    The projection matrix depends only on (seed, latent_dim, width, height),
    so identical requests always produce identical images.
    """

    output_range = "tanh"

    def __init__(self, latent_dim: int = 100, width: int = 128, height: int = 128,
                 seed: int = 0):
        if latent_dim < 1 or width < 1 or height < 1:
            raise ModelError("latent_dim, width and height must be positive")
        self.latent_dim = latent_dim
        self.width = width
        self.height = height
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([0x6B12, seed, latent_dim, width, height])))
        out = width * height * 3
        self._weights = rng.standard_normal((latent_dim, out))
        self._bias = rng.standard_normal(out)

    def generate(self, z: np.ndarray) -> np.ndarray:
        pre = z @ self._weights / math.sqrt(self.latent_dim) + self._bias
        return np.tanh(pre).reshape(self.height, self.width, 3)

    def discriminate(self, z: np.ndarray, rgb: np.ndarray) -> float:
        return shell_score(z)


class CheckpointModel:
    """TorchScript checkpoint wrapper.

    The checkpoint must be a ``torch.jit`` module whose forward maps a float32
    latent batch (1, latent_dim) to an image batch (1, 3, height, width) in
    its output range. If the module exposes a ``discriminate(z, image)``
    method its scalar is used (already normalized so 0 = most real);
    otherwise the shell-distance fallback scores realness.
    """

    def __init__(self, path: str, latent_dim: int, width: int, height: int,
                 output_range: str = "tanh"):
        try:
            import torch
        except ImportError as exc:
            raise ModelError("checkpoint support requires the torch extra") from exc
        try:
            self._module = torch.jit.load(path, map_location="cpu")
        except (OSError, RuntimeError, ValueError) as exc:
            raise ModelError(f"cannot load checkpoint {path}: {exc}") from exc
        self._torch = torch
        self.latent_dim = latent_dim
        self.width = width
        self.height = height
        self.output_range = output_range

    def generate(self, z: np.ndarray) -> np.ndarray:
        torch = self._torch
        with torch.no_grad():
            batch = torch.from_numpy(np.asarray(z, dtype=np.float32)).reshape(1, -1)
            out = self._module(batch)
        arr = out.detach().cpu().numpy()
        if arr.shape != (1, 3, self.height, self.width):
            raise ModelError(f"checkpoint produced shape {arr.shape}, expected "
                             f"(1, 3, {self.height}, {self.width})")
        return np.transpose(arr[0], (1, 2, 0)).astype(np.float64)

    def discriminate(self, z: np.ndarray, rgb: np.ndarray) -> float:
        torch = self._torch
        if hasattr(self._module, "discriminate"):
            with torch.no_grad():
                zt = torch.from_numpy(np.asarray(z, dtype=np.float32)).reshape(1, -1)
                img = torch.from_numpy(rgb.astype(np.float32) / 255.0)
                score = self._module.discriminate(zt, img.permute(2, 0, 1).unsqueeze(0))
            return float(score)
        return shell_score(z)

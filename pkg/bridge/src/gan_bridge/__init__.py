"""Reference server speaking the latent-evolution wire protocol.

Wraps a trained generator/discriminator checkpoint when one is available and
falls back to a deterministic procedural model otherwise. The package is
self-contained: it shares only the wire format with its clients.
"""

from gan_bridge.model import CheckpointModel, ModelError, ProceduralModel
from gan_bridge.server import ServerConfig, serve_stdio, serve_tcp, to_rgb8

__all__ = [
    "CheckpointModel",
    "ModelError",
    "ProceduralModel",
    "ServerConfig",
    "serve_stdio",
    "serve_tcp",
    "to_rgb8",
]

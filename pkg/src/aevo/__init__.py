"""Latent-space evolution of generator images toward extreme aesthetic measures.

The package is organised as a small numpy library:

- ``aevo.imagecore``   raster type, HSV, perceptual luminance, superpixels, PPM I/O
- ``aevo.aesthetics``  the five aesthetic feature measures
- ``aevo.objective``   fitness composition with the realness cut-off
- ``aevo.search``      (1+1) EA and CMA-ES over the latent vector
- ``aevo.protocol``    binary wire protocol for external generators
- ``aevo.genesis``     built-in procedural generator endpoints and protocol client
- ``aevo.harness``     experiment grids, CSV/SVG/PPM outputs
- ``aevo.cli``         command line entry point
"""

from aevo.imagecore import Image, read_ppm, write_ppm
from aevo.aesthetics import FeatureId, FeatureValue, measure
from aevo.objective import Direction, ObjectiveSpec, FitnessReport, evaluate
from aevo.genesis import BuiltinEndpoint, ExternalEndpoint
from aevo.search import OptimizerConfig, RunTrace, opo_ea_run, cma_run

__all__ = [
    "Image", "read_ppm", "write_ppm",
    "FeatureId", "FeatureValue", "measure",
    "Direction", "ObjectiveSpec", "FitnessReport", "evaluate",
    "BuiltinEndpoint", "ExternalEndpoint",
    "OptimizerConfig", "RunTrace", "opo_ea_run", "cma_run",
]

__version__ = "0.1.0"

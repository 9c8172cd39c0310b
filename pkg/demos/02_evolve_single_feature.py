"""Evolving a latent vector toward an extreme feature value.

A built-in generator maps a 100-dimensional latent vector to an image.
CMA-ES searches latent space for images whose mean hue is as low (then as
high) as possible, while a realness cut-off keeps the latent vector near the
shell where the generator's inputs normally live. The evolved images and the
per-generation fitness trace are written to demos/out/evolve/.
"""

import os

from aevo import (BuiltinEndpoint, Direction, FeatureId, ObjectiveSpec,
                  OptimizerConfig, cma_run, write_ppm)
from aevo.harness import export_trace_csv
from aevo.objective import make_objective

OUT = os.path.join(os.path.dirname(__file__), "out", "evolve")
os.makedirs(OUT, exist_ok=True)

endpoint = BuiltinEndpoint(kind="builtin-linear", image_size=(32, 32), seed=7)

for direction in (Direction.MINIMIZE, Direction.MAXIMIZE):
    spec = ObjectiveSpec(terms=((FeatureId.HUE, direction),), cutoff_c=0.02)
    config = OptimizerConfig(algorithm="cma-es", latent_dim=100, population=16,
                             generations=60, seed=11)
    trace = cma_run(make_objective(endpoint, spec), config)

    report = trace.best_report
    hue = report.feature_values[0].value
    stem = f"hue_{direction.value}"
    write_ppm(endpoint.generate(trace.best_z), os.path.join(OUT, f"{stem}.ppm"))
    export_trace_csv(os.path.join(OUT, f"{stem}_trace.csv"), trace, spec)
    print(f"{direction.value} hue: achieved {hue:.4f} after {trace.eval_count} "
          f"evaluations (|realness| = {abs(report.realness_raw):.4f}, "
          f"penalty factor = {report.realness_factor:.4f})")

print(f"\nImages and traces written to {OUT}")
print("View the PPM files with any image viewer, or inspect them via:")
print("  aevo eval-features demos/out/evolve/hue_max.ppm")

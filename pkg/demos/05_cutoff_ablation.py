"""What the realness cut-off buys, and what it costs.

The fitness of a candidate is the product of its feature terms and a realness
factor 1 + cutoff(|score|, c): candidates the discriminator rates more real
than the threshold c pay no penalty at all, while unrealistic ones pay in
proportion to their score. Sweeping c shows the trade-off — a loose cut-off
lets the search drift far from the realistic region to reach more extreme
feature values; a tight one holds it back.
"""

import math
import os

from aevo.harness import ExperimentConfig, run_cutoff_ablation

OUT = os.path.join(os.path.dirname(__file__), "out", "cutoff")

config = ExperimentConfig.from_json({
    "schema_version": 1,
    "endpoint": {"kind": "builtin-linear", "latent_dim": 100,
                 "image_size": [16, 16], "seed": 7},
    "optimizer": {"algorithm": "cma-es", "generations": 50, "population": 16},
    "seeds": [11],
    "output_dir": OUT,
    "grid": {"feature": "hue", "direction": "max"},
})

cutoffs = [math.inf, 0.2, 0.05, 0.02, 0.008]
table = run_cutoff_ablation(config, cutoffs)

print(f"{'cut-off':>8} {'achieved hue':>13} {'|realness|':>11}")
for cutoff, row in zip(cutoffs, table.rows):
    label = "off" if math.isinf(cutoff) else f"{cutoff:g}"
    hue = list(row.achieved.values())[0]
    print(f"{label:>8} {hue:>13.4f} {abs(row.realness_raw):>11.4f}")

print(f"\nFull table written to {os.path.join(OUT, 'cutoff.csv')}")

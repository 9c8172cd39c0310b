"""Evolving two features at once: the four-corner pair grid.

For a pair of features the toolkit runs four searches — every combination of
minimizing and maximizing each feature — and plots the achieved values as a
quadrilateral. A wide quadrilateral means the two features vary freely; a
degenerate one reveals a conflict where pushing one feature drags the other
along. GCF (contrast) and smoothness conflict by construction: sharp edges
raise contrast and lower smoothness.
"""

import os

from aevo.harness import ExperimentConfig, run_pair_grid

OUT = os.path.join(os.path.dirname(__file__), "out", "pairs")

config = ExperimentConfig.from_json({
    "schema_version": 1,
    "endpoint": {"kind": "builtin-linear", "latent_dim": 100,
                 "image_size": [16, 16], "seed": 7},
    "optimizer": {"algorithm": "cma-es", "generations": 40, "population": 16},
    "objective": {"cutoff": 0.008, "gcf_scale": 0.25},
    "seeds": [3],
    "output_dir": OUT,
    "grid": {"pairs": [["gcf", "smoothness"], ["hue", "saturation"]]},
})

table = run_pair_grid(config)

by_pair = {}
for row in table.rows:
    by_pair.setdefault(row.cell, []).append(row)

for pair, rows in by_pair.items():
    print(f"\n{pair}:")
    f1, f2 = pair.split("-")
    for row in rows:
        values = list(row.achieved.values())
        print(f"  {row.corner:<14} {f1}={values[0]:.4f}  {f2}={values[1]:.4f}")

print(f"\nCSV tables and SVG quadrilateral plots written to {OUT}")
print("Open plots/gcf-smoothness.svg to see the conflict geometry.")

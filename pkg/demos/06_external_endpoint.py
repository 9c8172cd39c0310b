"""Driving an external generator process over the wire protocol.

Any process that speaks the framed binary protocol — HELLO on connect, then
GEN_REQ/IMG_RESP and DISC_REQ/DISC_RESP round trips — can serve as the image
source for evolution. This script first verifies a server with the
`protocol-check` conformance probe, then runs a short evolution against it.

The built-in echo stub ships with the package; the standalone `gan-bridge`
package (see ../bridge) implements the same contract and can wrap a real
trained checkpoint.
"""

import sys

from aevo import (Direction, ExternalEndpoint, FeatureId, ObjectiveSpec,
                  OptimizerConfig, cma_run)
from aevo.objective import make_objective
from aevo.protocheck import check_server

SERVER = f"stdio:{sys.executable} -m aevo.stub --latent-dim 32 --width 16 --height 16"

print("1. Conformance probe (handshake, 50 round trips, malformed-frame rejection):")
result = check_server(SERVER, rounds=50)
print("  ", result.summary())
if not result.passed:
    sys.exit(1)

print("\n2. Evolving minimum saturation through the external endpoint:")
with ExternalEndpoint(SERVER) as endpoint:
    spec = ObjectiveSpec(terms=((FeatureId.SATURATION, Direction.MINIMIZE),))
    config = OptimizerConfig(algorithm="cma-es", latent_dim=endpoint.latent_dim,
                             population=8, generations=30, seed=2)
    trace = cma_run(make_objective(endpoint, spec), config)
    value = trace.best_report.feature_values[0].value
    print(f"   achieved saturation {value:.4f} in {trace.eval_count} evaluations, "
          f"zero protocol errors")

print("\nTo use the standalone bridge server instead:")
print('   SERVER = "stdio:gan-bridge --latent-dim 32 --width 16 --height 16"')

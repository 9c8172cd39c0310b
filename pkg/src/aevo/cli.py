"""Command line interface.

Subcommands: evolve, grid-single, grid-pairs, cutoff-ablation,
compare-optimizers, eval-features, protocol-check.

Exit codes: 0 success, 2 config error, 3 protocol/endpoint error,
4 partial grid failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from aevo import harness, protocol
from aevo.aesthetics import FeatureId
from aevo.genesis import EndpointError, endpoint_from_config
from aevo.harness import ConfigError, ExperimentConfig
from aevo.imagecore import write_ppm
from aevo.objective import Direction, make_objective
from aevo.protocheck import check_server
from aevo.search import (Algorithm, ObjectiveEvaluationError, OptimizerConfig,
                         OptimizerConfigError, compare_runs, run)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ENDPOINT = 3
EXIT_PARTIAL = 4


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config)
    if getattr(args, "output_dir", None):
        config.output_dir = args.output_dir
    if getattr(args, "seeds", None):
        config.seeds = [int(s) for s in args.seeds.split(",")]
    if getattr(args, "generations", None):
        config.optimizer["generations"] = args.generations
    if getattr(args, "population", None):
        config.optimizer["population"] = args.population
    if getattr(args, "cutoff", None) is not None:
        config.objective["cutoff"] = None if args.cutoff == "inf" else float(args.cutoff)
    if getattr(args, "workers", None):
        config.workers = args.workers
    return config


def _grid_exit(table) -> int:
    if table.failed:
        failed = [r for r in table.rows if r.error]
        print(f"{len(failed)} of {len(table.rows)} cells failed:", file=sys.stderr)
        for r in failed:
            print(f"  {r.cell}/{r.corner}/seed{r.seed}: {r.error}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_evolve(args) -> int:
    config = _load_config(args)
    feat = FeatureId(args.feature)
    direction = Direction.MINIMIZE if args.direction == "min" else Direction.MAXIMIZE
    endpoint = endpoint_from_config(config.endpoint)
    spec = config.objective_spec([(feat, direction)])
    opt = config.optimizer_config(config.seeds[0], latent_dim=endpoint.latent_dim)
    os.makedirs(config.output_dir, exist_ok=True)
    write_ppm(harness._initial_image(endpoint, opt),
              os.path.join(config.output_dir, "initial.ppm"))
    trace = run(make_objective(endpoint, spec), opt)
    write_ppm(endpoint.generate(trace.best_z), os.path.join(config.output_dir, "best.ppm"))
    harness.export_trace_csv(os.path.join(config.output_dir, "trace.csv"), trace, spec)
    report = trace.best_report
    values = " ".join(f"{v.feature.value}={v.value:.6f}" for v in report.feature_values)
    print(f"best fitness {report.fitness:.6f} after {trace.eval_count} evals: "
          f"{values} realness={report.realness_raw:.6f}")
    return EXIT_OK


def cmd_grid_single(args) -> int:
    config = _load_config(args)
    return _grid_exit(harness.run_single_grid(config))


def cmd_grid_pairs(args) -> int:
    config = _load_config(args)
    return _grid_exit(harness.run_pair_grid(config))


def cmd_cutoff_ablation(args) -> int:
    config = _load_config(args)
    cutoffs = [math.inf if c.strip() == "inf" else float(c)
               for c in args.cutoffs.split(",") if c.strip()]
    return _grid_exit(harness.run_cutoff_ablation(config, cutoffs))


def cmd_compare_optimizers(args) -> int:
    config = _load_config(args) if args.config else None
    dim = args.sphere_dim
    if config is not None:
        endpoint = endpoint_from_config(config.endpoint)
        feat = FeatureId(args.feature)
        direction = Direction.MINIMIZE if args.direction == "min" else Direction.MAXIMIZE
        spec = config.objective_spec([(feat, direction)])
        objective = make_objective(endpoint, spec)
        dim = endpoint.latent_dim
    else:
        objective = lambda z: float(np.dot(z, z))  # sphere benchmark
    budget = args.budget
    population = args.population
    if budget % population:
        print(f"budget {budget} not divisible by population {population}", file=sys.stderr)
        return EXIT_CONFIG
    configs = [
        OptimizerConfig(algorithm=Algorithm.CMA_ES, latent_dim=dim,
                        budget_evals=budget, generations=budget // population,
                        population=population, seed=args.seed),
        OptimizerConfig(algorithm=Algorithm.ONE_PLUS_ONE_EA, latent_dim=dim,
                        budget_evals=budget, seed=args.seed),
    ]
    rows = compare_runs(objective, configs, n_seeds=args.n_seeds)
    header = f"{'algorithm':<12} {'median':>14} {'iqr':>14} {'median s':>10} {'failures':>8}"
    print(header)
    for row in rows:
        print(f"{row['algorithm']:<12} {row.get('median_fitness', float('nan')):>14.6g} "
              f"{row.get('iqr_fitness', float('nan')):>14.6g} "
              f"{row.get('median_wall_time', float('nan')):>10.2f} {row['failures']:>8}")
    if args.out:
        harness.write_csv(args.out,
                          ["algorithm", "median_fitness", "iqr_fitness", "failures"],
                          [[r["algorithm"], r.get("median_fitness", ""),
                            r.get("iqr_fitness", ""), str(r["failures"])] for r in rows])
    return EXIT_OK


def cmd_eval_features(args) -> int:
    sys.stdout.write(harness.eval_features(args.image))
    return EXIT_OK


def cmd_protocol_check(args) -> int:
    result = check_server(args.connect, rounds=args.rounds, seed=args.seed)
    print(result.summary())
    return EXIT_OK if result.passed else EXIT_ENDPOINT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aevo",
        description="evolve generator latent vectors toward extreme aesthetic measures")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--output-dir", help="override output directory")
        p.add_argument("--seeds", help="comma-separated seed list override")
        p.add_argument("--generations", type=int, help="override optimizer generations")
        p.add_argument("--population", type=int, help="override population size")
        p.add_argument("--cutoff", help="override realness cut-off ('inf' disables)")
        p.add_argument("--workers", type=int, help="parallel grid cells")

    p = sub.add_parser("evolve", help="one evolution run for a single feature")
    add_config_flags(p)
    p.add_argument("--feature", required=True, choices=[f.value for f in FeatureId])
    p.add_argument("--direction", default="min", choices=["min", "max"])
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("grid-single", help="feature x {Min,Max} x seed grid")
    add_config_flags(p)
    p.set_defaults(func=cmd_grid_single)

    p = sub.add_parser("grid-pairs", help="four-corner runs per feature pair")
    add_config_flags(p)
    p.set_defaults(func=cmd_grid_pairs)

    p = sub.add_parser("cutoff-ablation", help="same objective at several cut-offs")
    add_config_flags(p)
    p.add_argument("--cutoffs", default="0.2,0.05,0.02",
                   help="comma-separated cut-off values; 'inf' disables")
    p.set_defaults(func=cmd_cutoff_ablation)

    p = sub.add_parser("compare-optimizers", help="CMA-ES vs (1+1) EA at equal budget")
    p.add_argument("--config", help="experiment config JSON (endpoint objective)")
    p.add_argument("--feature", default="hue", choices=[f.value for f in FeatureId])
    p.add_argument("--direction", default="min", choices=["min", "max"])
    p.add_argument("--sphere-dim", type=int, default=20,
                   help="sphere benchmark dimension when no config is given")
    p.add_argument("--budget", type=int, default=20000)
    p.add_argument("--population", type=int, default=40)
    p.add_argument("--n-seeds", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", help="write the comparison table as CSV")
    p.set_defaults(func=cmd_compare_optimizers)

    p = sub.add_parser("eval-features", help="print all five measures of a PPM")
    p.add_argument("image")
    p.set_defaults(func=cmd_eval_features)

    p = sub.add_parser("protocol-check", help="conformance-check an external server")
    p.add_argument("--connect", required=True,
                   help="transport spec: 'stdio:<command>' or 'tcp:<host>:<port>'")
    p.add_argument("--rounds", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_protocol_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OptimizerConfigError, FileNotFoundError, ValueError) as exc:
        # PpmParseError is a ValueError: malformed inputs land here too
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (protocol.ProtocolError, EndpointError, ObjectiveEvaluationError, OSError) as exc:
        print(f"endpoint error: {exc}", file=sys.stderr)
        return EXIT_ENDPOINT


if __name__ == "__main__":
    sys.exit(main())

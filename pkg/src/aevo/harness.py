"""Experiment runner: single-feature grids, pair grids, cut-off ablations.

Experiments are described by a versioned JSON config. Every achieved value in
a result table is recomputed from the saved best image, so the tables stay
auditable from the artifacts alone, and all CSV/PPM outputs are byte-stable
under rerun with the same config.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from aevo.aesthetics import FeatureId, measure, measure_all
from aevo.genesis import endpoint_from_config
from aevo.imagecore import read_ppm, write_ppm
from aevo.objective import ConstraintMode, Direction, ObjectiveSpec, make_objective
from aevo.search import Algorithm, OptimizerConfig, run

SCHEMA_VERSION = 1
OUTPUT_ROOT_ENV = "AEVO_OUTPUT_ROOT"

PAIR_CORNERS = (
    ("Min.f1-Min.f2", Direction.MINIMIZE, Direction.MINIMIZE),
    ("Min.f1-Max.f2", Direction.MINIMIZE, Direction.MAXIMIZE),
    ("Max.f1-Min.f2", Direction.MAXIMIZE, Direction.MINIMIZE),
    ("Max.f1-Max.f2", Direction.MAXIMIZE, Direction.MAXIMIZE),
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    endpoint: dict
    optimizer: dict = field(default_factory=dict)
    objective: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [1])
    workers: int = 1
    output_dir: str = "out"

    @staticmethod
    def from_json(document: dict) -> "ExperimentConfig":
        if not isinstance(document, dict):
            raise ConfigError("config must be a JSON object")
        version = document.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"schema_version {version!r}, expected {SCHEMA_VERSION}")
        known = {"schema_version", "endpoint", "optimizer", "objective", "grid",
                 "seeds", "workers", "output_dir"}
        unknown = set(document) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "endpoint" not in document:
            raise ConfigError("config requires an 'endpoint' object")
        cfg = ExperimentConfig(
            endpoint=document["endpoint"],
            optimizer=document.get("optimizer", {}),
            objective=document.get("objective", {}),
            grid=document.get("grid", {}),
            seeds=list(document.get("seeds", [1])),
            workers=int(document.get("workers", 1)),
            output_dir=document.get("output_dir", "out"),
        )
        if not cfg.seeds:
            raise ConfigError("'seeds' must not be empty")
        root = os.environ.get(OUTPUT_ROOT_ENV)
        if root:
            cfg.output_dir = os.path.join(root, cfg.output_dir)
        return cfg

    @staticmethod
    def load(path: str) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                document = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return ExperimentConfig.from_json(document)

    def optimizer_config(self, seed: int, latent_dim: int | None = None) -> OptimizerConfig:
        opts = dict(self.optimizer)
        opts.setdefault("algorithm", "cma-es")
        opts.setdefault("generations", 200)
        opts.setdefault("population", 16)
        opts["seed"] = seed
        if latent_dim is not None:
            opts["latent_dim"] = latent_dim
        try:
            return OptimizerConfig(**opts)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad optimizer config: {exc}") from exc

    def objective_spec(self, terms, cutoff_override=None) -> ObjectiveSpec:
        obj = self.objective
        cutoff = obj.get("cutoff", 0.02 if len(terms) == 1 else 0.008)
        if cutoff_override is not None:
            cutoff = cutoff_override
        if cutoff is None:  # JSON null disables the constraint
            cutoff = math.inf
        try:
            return ObjectiveSpec(
                terms=tuple(terms),
                cutoff_c=float(cutoff),
                stable_s=float(obj.get("stable", 0.0)),
                gcf_scale=float(obj.get("gcf_scale", 1.0)),
                constraint_mode=ConstraintMode(obj.get("constraint_mode", "cutoff-penalty")),
            )
        except ValueError as exc:
            raise ConfigError(f"bad objective config: {exc}") from exc


@dataclass
class ResultRow:
    cell: str
    corner: str
    seed: int
    achieved: dict  # FeatureId -> value recomputed from the saved image
    realness_raw: float | None
    fitness: float | None
    evals: int
    image_path: str | None
    error: str | None = None


@dataclass
class ResultTable:
    rows: list[ResultRow]

    @property
    def failed(self) -> bool:
        return any(r.error for r in self.rows)


def fmt(x: float) -> str:
    """Shortest round-trip float formatting, stable across reruns."""
    return repr(float(x))


def write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(x if isinstance(x, str) else fmt(x) for x in row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def _initial_image(endpoint, opt_config: OptimizerConfig):
    """The image of the run's first random latent vector (same seed stream)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(opt_config.seed)))
    z0 = rng.standard_normal(opt_config.latent_dim)
    return endpoint.generate(z0)


def _run_cell(config: ExperimentConfig, endpoint, cell: str, corner: str,
              terms, seed: int, cutoff_override=None) -> ResultRow:
    image_dir = os.path.join(config.output_dir, "images")
    os.makedirs(image_dir, exist_ok=True)
    stem = f"{cell}_{corner}_seed{seed}".replace(".", "").replace(" ", "")
    try:
        spec = config.objective_spec(terms, cutoff_override)
        opt = config.optimizer_config(seed, latent_dim=endpoint.latent_dim)
        write_ppm(_initial_image(endpoint, opt), os.path.join(image_dir, stem + "_initial.ppm"))
        trace = run(make_objective(endpoint, spec), opt)
        best_img = endpoint.generate(trace.best_z)
        image_path = os.path.join(image_dir, stem + "_best.ppm")
        write_ppm(best_img, image_path)
        reloaded = read_ppm(image_path)
        achieved = {f: measure(f, reloaded).value for f, _ in spec.terms}
        return ResultRow(cell, corner, seed, achieved,
                         trace.best_report.realness_raw, trace.best_report.fitness,
                         trace.eval_count, image_path)
    except ConfigError:
        raise
    except Exception as exc:
        return ResultRow(cell, corner, seed, {}, None, None, 0, None, error=str(exc))


def _run_cells(config: ExperimentConfig, endpoint, cells: list[tuple]) -> list[ResultRow]:
    """Run (cell, corner, terms, seed, cutoff) tuples, optionally in parallel.

    Results are assembled in input order regardless of completion order.
    """
    if config.workers <= 1:
        return [_run_cell(config, endpoint, *cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(_run_cell, config, endpoint, *cell) for cell in cells]
        return [f.result() for f in futures]


def _results_csv(path: str, table: ResultTable) -> None:
    rows = []
    for r in table.rows:
        achieved = ";".join(f"{f.value}={fmt(v)}" for f, v in r.achieved.items())
        rows.append([r.cell, r.corner, str(r.seed), achieved,
                     "" if r.realness_raw is None else fmt(r.realness_raw),
                     "" if r.fitness is None else fmt(r.fitness),
                     str(r.evals), r.error or ""])
    write_csv(path, ["cell", "corner", "seed", "achieved", "realness_raw",
                     "fitness", "evals", "error"], rows)


def run_single_grid(config: ExperimentConfig) -> ResultTable:
    """Every feature x {Min, Max} x seed; emits results.csv and table1.csv."""
    features = [FeatureId(f) for f in config.grid.get("features", [f.value for f in FeatureId])]
    if not features:
        raise ConfigError("single grid needs at least one feature")
    endpoint = endpoint_from_config(config.endpoint)
    cells = []
    for feat in features:
        for corner, direction in (("Min", Direction.MINIMIZE), ("Max", Direction.MAXIMIZE)):
            for seed in config.seeds:
                cells.append((feat.value, corner, [(feat, direction)], seed, None))
    table = ResultTable(_run_cells(config, endpoint, cells))
    _results_csv(os.path.join(config.output_dir, "results.csv"), table)

    # Table-1 style summary: most extreme achieved value per direction over seeds
    summary = []
    for feat in features:
        mins = [r.achieved[feat] for r in table.rows
                if r.cell == feat.value and r.corner == "Min" and not r.error]
        maxs = [r.achieved[feat] for r in table.rows
                if r.cell == feat.value and r.corner == "Max" and not r.error]
        summary.append([feat.value,
                        fmt(min(mins)) if mins else "",
                        fmt(max(maxs)) if maxs else ""])
    write_csv(os.path.join(config.output_dir, "table1.csv"),
              ["Feature", "Min", "Max"], summary)
    return table


DEFAULT_PAIRS = (
    ("gcf", "saturation"), ("gcf", "smoothness"), ("hue", "saturation"),
    ("hue", "symmetry"), ("saturation", "symmetry"), ("smoothness", "saturation"),
)


def run_pair_grid(config: ExperimentConfig) -> ResultTable:
    """Four-corner runs per feature pair; emits CSVs, plot data and SVG plots."""
    pairs = [tuple(FeatureId(f) for f in p) for p in config.grid.get("pairs", DEFAULT_PAIRS)]
    for f1, f2 in pairs:
        if f1 == f2:
            raise ConfigError(f"pair features must differ, got ({f1.value}, {f2.value})")
    endpoint = endpoint_from_config(config.endpoint)
    cells = []
    for f1, f2 in pairs:
        name = f"{f1.value}-{f2.value}"
        for corner, d1, d2 in PAIR_CORNERS:
            for seed in config.seeds:
                cells.append((name, corner, [(f1, d1), (f2, d2)], seed, None))
    table = ResultTable(_run_cells(config, endpoint, cells))
    _results_csv(os.path.join(config.output_dir, "results.csv"), table)

    pair_rows = []
    plot_rows = []
    for f1, f2 in pairs:
        name = f"{f1.value}-{f2.value}"
        cell_values = []
        for corner, _, _ in PAIR_CORNERS:
            done = [r for r in table.rows
                    if r.cell == name and r.corner == corner and not r.error]
            if done:
                r = done[0]  # first seed is the reported one
                cell_values.append(f"{fmt(r.achieved[f1])} - {fmt(r.achieved[f2])}")
                plot_rows.append([name, corner, fmt(r.achieved[f1]), fmt(r.achieved[f2])])
            else:
                cell_values.append("")
        pair_rows.append([name] + cell_values)
        points = [(float(p[2]), float(p[3]), p[1]) for p in plot_rows if p[0] == name]
        if len(points) == 4:
            svg_path = os.path.join(config.output_dir, "plots", f"{name}.svg")
            write_text_atomic(svg_path, quadrilateral_svg(name, f1.value, f2.value, points))
    write_csv(os.path.join(config.output_dir, "pairs.csv"),
              ["Feature pairs"] + [c for c, _, _ in PAIR_CORNERS], pair_rows)
    write_csv(os.path.join(config.output_dir, "plotdata.csv"),
              ["pair", "corner", "f1", "f2"], plot_rows)
    return table


def run_cutoff_ablation(config: ExperimentConfig, cutoffs: list[float]) -> ResultTable:
    """One run per cut-off value for a single fixed objective."""
    if not cutoffs:
        raise ConfigError("cutoff ablation needs at least one cutoff value")
    feat = FeatureId(config.grid.get("feature", "hue"))
    direction = Direction("min" if config.grid.get("direction", "min") == "min" else "max")
    endpoint = endpoint_from_config(config.endpoint)
    cells = []
    for cutoff in cutoffs:
        label = "inf" if math.isinf(cutoff) else fmt(cutoff)
        for seed in config.seeds:
            cells.append((f"{feat.value}_{direction.value}", f"c={label}",
                          [(feat, direction)], seed, cutoff))
    table = ResultTable(_run_cells(config, endpoint, cells))
    rows = []
    for (cutoff, row) in zip([c for c in cutoffs for _ in config.seeds], table.rows):
        rows.append(["inf" if math.isinf(cutoff) else fmt(cutoff),
                     fmt(row.achieved[feat]) if not row.error else "",
                     "" if row.realness_raw is None else fmt(row.realness_raw),
                     str(row.seed), row.error or ""])
    write_csv(os.path.join(config.output_dir, "cutoff.csv"),
              ["cutoff", "achieved", "realness_raw", "seed", "error"], rows)
    return table


def eval_features(image_path: str) -> str:
    """All five measures of a PPM file as one CSV line (with header)."""
    img = read_ppm(image_path)
    values = measure_all(img)
    header = ",".join(v.feature.value for v in values)
    line = ",".join(fmt(v.value) for v in values)
    return f"{header}\n{line}\n"


def export_trace_csv(path: str, trace, spec: ObjectiveSpec | None) -> None:
    """Per-generation trace: generation, evals, best fitness, best features."""
    feat_cols = [f.value for f in spec.features] if spec else []
    header = ["generation", "evals", "best_fitness"] + feat_cols + ["realness_raw"]
    rows = []
    pop = max(1, trace.eval_count // max(1, len(trace.best_fitness_per_generation)))
    for gen, (fit, report) in enumerate(zip(trace.best_fitness_per_generation,
                                            trace.best_report_per_generation)):
        row = [str(gen), str(min((gen + 1) * pop, trace.eval_count)), fmt(fit)]
        if hasattr(report, "feature_values"):
            row += [fmt(v.value) for v in report.feature_values]
            row += [fmt(report.realness_raw)]
        else:
            row += ["" for _ in feat_cols] + [""]
        rows.append(row)
    write_csv(path, header, rows)


def quadrilateral_svg(title: str, x_label: str, y_label: str,
                      points: list[tuple[float, float, str]],
                      size: int = 480, margin: int = 60) -> str:
    """Feature-space plot: the 4 corner points joined as a quadrilateral."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_pad = (x_hi - x_lo) * 0.15 or 0.05
    y_pad = (y_hi - y_lo) * 0.15 or 0.05
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad
    inner = size - 2 * margin

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * inner

    def sy(y):
        return size - margin - (y - y_lo) / (y_hi - y_lo) * inner

    # MinMin, MinMax, MaxMax, MaxMin traces the hull without self-crossing
    order = {"Min.f1-Min.f2": 0, "Min.f1-Max.f2": 1, "Max.f1-Max.f2": 2, "Max.f1-Min.f2": 3}
    ring = sorted(points, key=lambda p: order.get(p[2], 9))
    poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y, _ in ring)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<text x="{size / 2:.0f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{margin}" y1="{size - margin}" x2="{size - margin}" '
        f'y2="{size - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{size - margin}" '
        f'stroke="black"/>',
        f'<text x="{size / 2:.0f}" y="{size - 16}" text-anchor="middle" '
        f'font-size="13">{x_label}</text>',
        f'<text x="18" y="{size / 2:.0f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {size / 2:.0f})">{y_label}</text>',
        f'<polygon points="{poly}" fill="#d62728" fill-opacity="0.15" stroke="#d62728"/>',
    ]
    for x, y, label in points:
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" fill="#d62728"/>')
        parts.append(f'<text x="{sx(x) + 6:.2f}" y="{sy(y) - 6:.2f}" '
                     f'font-size="11">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

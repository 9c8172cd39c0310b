"""Derivative-free optimizers over the latent vector: (1+1) EA and CMA-ES.

Both minimize a callable ``objective(z) -> float | FitnessReport`` and are
bit-reproducible per seed: every run derives its random stream from
``numpy.random.SeedSequence(seed)`` through the default PCG64 generator, and
candidate ranking breaks fitness ties by candidate index.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

def _chi_n(n: int) -> float:
    """Expected norm of an n-dimensional standard normal vector."""
    return math.sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n))


class Algorithm(str, enum.Enum):
    ONE_PLUS_ONE_EA = "1+1-ea"
    CMA_ES = "cma-es"


class OptimizerConfigError(ValueError):
    pass


class ObjectiveEvaluationError(RuntimeError):
    """Objective raised mid-run; ``trace`` holds the progress made so far."""

    def __init__(self, cause: BaseException, trace: "RunTrace"):
        super().__init__(f"objective evaluation failed: {cause}")
        self.cause = cause
        self.trace = trace


@dataclass(frozen=True)
class OptimizerConfig:
    algorithm: Algorithm = Algorithm.CMA_ES
    latent_dim: int = 100
    budget_evals: int = 80000
    generations: int = 2000
    population: int = 40
    seed: int = 0
    sigma0: float = 0.5
    ea_sigma: float = 0.1
    clamp_latent: float | None = None  # box |z_i| <= value; rejected strategy, off by default

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.latent_dim < 1:
            raise OptimizerConfigError("latent_dim must be >= 1")
        if self.algorithm is Algorithm.CMA_ES and self.population < 2:
            raise OptimizerConfigError("CMA-ES needs population >= 2")
        if self.sigma0 <= 0 or self.ea_sigma <= 0:
            raise OptimizerConfigError("step sizes must be > 0")
        if self.budget_evals < 1 or self.generations < 1:
            raise OptimizerConfigError("budget must be positive")

    @property
    def total_evals(self) -> int:
        if self.algorithm is Algorithm.CMA_ES:
            return self.generations * self.population
        return self.budget_evals


@dataclass
class RunTrace:
    best_fitness_per_generation: list[float]
    best_report_per_generation: list  # best-so-far result object per generation
    best_z: np.ndarray
    best_report: object  # FitnessReport when the objective produced one
    eval_count: int
    wall_time: float
    warnings: list[str] = field(default_factory=list)


def _fitness_of(result) -> float:
    return result.fitness if hasattr(result, "fitness") else float(result)


def _rng_for_run(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _clamp(z: np.ndarray, bound: float | None) -> np.ndarray:
    return z if bound is None else np.clip(z, -bound, bound)


def opo_ea_run(objective, config: OptimizerConfig) -> RunTrace:
    """Elitist (1+1) EA with fixed isotropic Gaussian mutation."""
    if config.algorithm is not Algorithm.ONE_PLUS_ONE_EA:
        raise OptimizerConfigError("config.algorithm must be the (1+1) EA")
    rng = _rng_for_run(config.seed)
    start = time.perf_counter()
    series: list[float] = []
    reports: list = []
    z = _clamp(rng.standard_normal(config.latent_dim), config.clamp_latent)
    evals = 0

    def make_trace(best_z, best_report):
        return RunTrace(series, reports, np.array(best_z), best_report, evals,
                        time.perf_counter() - start)

    try:
        report = objective(z)
    except Exception as exc:
        raise ObjectiveEvaluationError(exc, make_trace(z, None)) from exc
    evals = 1
    best = _fitness_of(report)
    series.append(best)
    reports.append(report)
    while evals < config.budget_evals:
        candidate = _clamp(z + config.ea_sigma * rng.standard_normal(config.latent_dim),
                           config.clamp_latent)
        try:
            cand_report = objective(candidate)
        except Exception as exc:
            raise ObjectiveEvaluationError(exc, make_trace(z, report)) from exc
        evals += 1
        if _fitness_of(cand_report) <= best:
            z, report, best = candidate, cand_report, _fitness_of(cand_report)
        series.append(best)
        reports.append(report)
    return make_trace(z, report)


class CmaState:
    """Full (mu/mu_w, lambda) CMA-ES strategy state."""

    def __init__(self, n: int, lam: int, sigma0: float, seed: int):
        self.n = n
        self.lam = lam
        self.mu = lam // 2
        raw = np.log(self.mu + 0.5) - np.log(np.arange(1, self.mu + 1))
        self.weights = raw / raw.sum()
        self.mu_eff = 1.0 / np.sum(self.weights ** 2)

        self.c_sigma = (self.mu_eff + 2.0) / (n + self.mu_eff + 5.0)
        self.d_sigma = (1.0 + 2.0 * max(0.0, math.sqrt((self.mu_eff - 1.0) / (n + 1.0)) - 1.0)
                        + self.c_sigma)
        self.c_c = (4.0 + self.mu_eff / n) / (n + 4.0 + 2.0 * self.mu_eff / n)
        self.c_1 = 2.0 / ((n + 1.3) ** 2 + self.mu_eff)
        self.c_mu = min(1.0 - self.c_1,
                        2.0 * (self.mu_eff - 2.0 + 1.0 / self.mu_eff)
                        / ((n + 2.0) ** 2 + self.mu_eff))
        self.chi_n = _chi_n(n)

        self.mean = np.zeros(n)
        self.sigma = sigma0
        self.C = np.eye(n)
        self.p_sigma = np.zeros(n)
        self.p_c = np.zeros(n)
        self.generation = 0
        self.rng = _rng_for_run(seed)
        self._decompose()

    def _decompose(self, floor: float = 1e-14) -> bool:
        """Refresh the cached eigendecomposition; returns True if repaired."""
        self.C = (self.C + self.C.T) / 2.0
        eigvals, self.B = np.linalg.eigh(self.C)
        repaired = bool(eigvals[0] < floor)
        if repaired:
            eigvals = np.maximum(eigvals, floor)
            self.C = (self.B * eigvals) @ self.B.T
            self.C = (self.C + self.C.T) / 2.0
        self.D = np.sqrt(eigvals)
        return repaired

    def ask(self) -> tuple[np.ndarray, np.ndarray]:
        """Sample lambda candidates; returns (candidates, unit-normal draws)."""
        z = self.rng.standard_normal((self.lam, self.n))
        y = z @ (self.B * self.D).T  # rows: B D z
        x = self.mean + self.sigma * y
        return x, y

    def tell(self, y: np.ndarray, fitness: np.ndarray) -> bool:
        """Rank candidates and update mean, paths, covariance and step size.

        Ties rank by candidate index (stable sort) so concurrent evaluation
        order cannot change the outcome. Returns True if the covariance
        needed an eigenvalue-floor repair.
        """
        order = np.argsort(fitness, kind="stable")[: self.mu]
        y_sel = y[order]
        y_w = self.weights @ y_sel
        self.mean = self.mean + self.sigma * y_w

        # C^{-1/2} y_w through the cached eigendecomposition
        c_inv_half_yw = self.B @ ((self.B.T @ y_w) / self.D)
        self.p_sigma = ((1.0 - self.c_sigma) * self.p_sigma
                        + math.sqrt(self.c_sigma * (2.0 - self.c_sigma) * self.mu_eff)
                        * c_inv_half_yw)
        self.generation += 1
        ps_norm = np.linalg.norm(self.p_sigma)
        h_sigma = (ps_norm / math.sqrt(1.0 - (1.0 - self.c_sigma) ** (2 * self.generation))
                   < (1.4 + 2.0 / (self.n + 1.0)) * self.chi_n)
        self.p_c = ((1.0 - self.c_c) * self.p_c
                    + h_sigma * math.sqrt(self.c_c * (2.0 - self.c_c) * self.mu_eff) * y_w)

        rank_mu = (y_sel * self.weights[:, None]).T @ y_sel
        delta_h = (1.0 - h_sigma) * self.c_c * (2.0 - self.c_c)
        self.C = ((1.0 - self.c_1 - self.c_mu) * self.C
                  + self.c_1 * (np.outer(self.p_c, self.p_c) + delta_h * self.C)
                  + self.c_mu * rank_mu)
        self.sigma *= math.exp((self.c_sigma / self.d_sigma) * (ps_norm / self.chi_n - 1.0))
        return self._decompose()


def cma_run(objective, config: OptimizerConfig, state_hook=None) -> RunTrace:
    """Standard CMA-ES for ``config.generations`` generations.

    ``state_hook(state)``, when given, runs after every update (used by the
    invariant checks in the tests).
    """
    if config.algorithm is not Algorithm.CMA_ES:
        raise OptimizerConfigError("config.algorithm must be CMA-ES")
    start = time.perf_counter()
    state = CmaState(config.latent_dim, config.population, config.sigma0, config.seed)
    series: list[float] = []
    best_reports: list = []
    warnings: list[str] = []
    best_fit = math.inf
    best_z = np.array(state.mean)
    best_report = None
    evals = 0

    def make_trace():
        return RunTrace(series, best_reports, np.array(best_z), best_report, evals,
                        time.perf_counter() - start, warnings)

    for gen in range(config.generations):
        x, y = state.ask()
        if config.clamp_latent is not None:
            x = _clamp(x, config.clamp_latent)
            y = (x - state.mean) / state.sigma
        fitness = np.empty(config.population)
        reports = [None] * config.population
        for i in range(config.population):
            try:
                reports[i] = objective(x[i])
            except Exception as exc:
                raise ObjectiveEvaluationError(exc, make_trace()) from exc
            fitness[i] = _fitness_of(reports[i])
            evals += 1
        gen_best = int(np.argmin(fitness))
        if fitness[gen_best] < best_fit:
            best_fit = fitness[gen_best]
            best_z = np.array(x[gen_best])
            best_report = reports[gen_best]
        series.append(best_fit)
        best_reports.append(best_report)
        if state.tell(y, fitness):
            warnings.append(f"generation {gen}: covariance repaired by eigenvalue flooring")
        if state_hook is not None:
            state_hook(state)
    return make_trace()


def run(objective, config: OptimizerConfig, state_hook=None) -> RunTrace:
    if config.algorithm is Algorithm.CMA_ES:
        return cma_run(objective, config, state_hook)
    return opo_ea_run(objective, config)


def compare_runs(objective, configs: list[OptimizerConfig], n_seeds: int = 10) -> list[dict]:
    """Median/IQR of best fitness and wall time per config over n_seeds runs.

    Per-cell failures are recorded in the row instead of aborting the table.
    All configs must share one evaluation budget.
    """
    budgets = {c.total_evals for c in configs}
    if len(configs) < 1:
        raise OptimizerConfigError("need at least one config")
    if len(budgets) != 1:
        raise OptimizerConfigError(f"configs disagree on evaluation budget: {budgets}")
    rows = []
    for config in configs:
        finals, times, errors = [], [], []
        for k in range(n_seeds):
            seeded = OptimizerConfig(**{**config.__dict__, "seed": config.seed + k})
            try:
                trace = run(objective, seeded)
            except ObjectiveEvaluationError as exc:
                errors.append(f"seed {seeded.seed}: {exc}")
                continue
            finals.append(trace.best_fitness_per_generation[-1])
            times.append(trace.wall_time)
        row = {"algorithm": config.algorithm.value, "seeds": n_seeds,
               "failures": len(errors), "errors": errors}
        if finals:
            q1, med, q3 = np.percentile(finals, [25, 50, 75])
            row.update(median_fitness=float(med), iqr_fitness=float(q3 - q1),
                       median_wall_time=float(np.median(times)))
        rows.append(row)
    return rows

"""Scalar fitness: feature terms times a realness factor, minimized by the search.

A term is the raw feature value when minimizing and its complement when
maximizing (reciprocal form for the unbounded contrast measure). The
discriminator's raw score passes through a cut-off so images more real than
the threshold incur no penalty at all.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from aevo.aesthetics import FeatureId, FeatureValue, measure


class Direction(str, enum.Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


class ConstraintMode(str, enum.Enum):
    """How realness constrains the search.

    CUTOFF_PENALTY is the method of record; DISCARD and CLAMP_LATENT are the
    two rejected alternatives, kept only as named options for comparison runs.
    """

    CUTOFF_PENALTY = "cutoff-penalty"
    DISCARD = "discard"
    CLAMP_LATENT = "clamp-latent"


class ObjectiveSpecError(ValueError):
    pass


@dataclass(frozen=True)
class ObjectiveSpec:
    """One or two (feature, direction) terms plus the cut-off parameters."""

    terms: tuple[tuple[FeatureId, Direction], ...]
    cutoff_c: float = 0.02
    stable_s: float = 0.0
    gcf_scale: float = 1.0
    constraint_mode: ConstraintMode = ConstraintMode.CUTOFF_PENALTY

    def __post_init__(self):
        terms = tuple((FeatureId(f), Direction(d)) for f, d in self.terms)
        object.__setattr__(self, "terms", terms)
        if len(terms) not in (1, 2):
            raise ObjectiveSpecError(f"need 1 or 2 terms, got {len(terms)}")
        if len(terms) == 2 and terms[0][0] == terms[1][0]:
            raise ObjectiveSpecError("pair features must be distinct")
        if self.cutoff_c < 0:
            raise ObjectiveSpecError("cutoff_c must be >= 0")
        if self.gcf_scale <= 0:
            raise ObjectiveSpecError("gcf_scale must be > 0")

    @property
    def features(self) -> list[FeatureId]:
        return [f for f, _ in self.terms]


@dataclass(frozen=True)
class FitnessReport:
    fitness: float
    feature_values: tuple[FeatureValue, ...]
    realness_raw: float
    realness_factor: float


def cutoff(x: float, c: float, s: float) -> float:
    """x if x >= c, else the stable value s."""
    return x if x >= c else s


def feature_term(value: FeatureValue, direction: Direction, spec: ObjectiveSpec) -> float:
    """Map a raw feature value to a [0, 1] term that is smaller when better."""
    if value.feature is FeatureId.GCF:
        scaled = value.value / spec.gcf_scale
        if direction is Direction.MINIMIZE:
            return min(scaled, 1.0)
        return 1.0 / (1.0 + scaled)
    if direction is Direction.MINIMIZE:
        return value.value
    return 1.0 - value.value


def realness_factor(raw: float, spec: ObjectiveSpec) -> float:
    """1 + cutoff(|raw|): neutral below the cut-off, grows with unrealness."""
    return 1.0 + cutoff(abs(raw), spec.cutoff_c, spec.stable_s)


def combined_fitness(values: list[FeatureValue], raw_realness: float,
                     spec: ObjectiveSpec) -> FitnessReport:
    if len(values) != len(spec.terms):
        raise ObjectiveSpecError(
            f"got {len(values)} feature values for {len(spec.terms)} terms")
    factor = realness_factor(raw_realness, spec)
    product = 1.0
    for value, (feat, direction) in zip(values, spec.terms):
        if value.feature != feat:
            raise ObjectiveSpecError(
                f"feature value {value.feature} does not match term {feat}")
        product *= feature_term(value, direction, spec)
    fitness = product * factor
    if spec.constraint_mode is ConstraintMode.DISCARD and abs(raw_realness) >= spec.cutoff_c:
        fitness = math.inf
    return FitnessReport(fitness, tuple(values), raw_realness, factor)


def evaluate(z, endpoint, spec: ObjectiveSpec) -> FitnessReport:
    """Generate, measure and score one latent vector through an endpoint."""
    img = endpoint.generate(z)
    values = [measure(feat, img) for feat in spec.features]
    raw = endpoint.realness(z, img)
    return combined_fitness(values, raw, spec)


def make_objective(endpoint, spec: ObjectiveSpec):
    """Bind endpoint and spec into a z -> FitnessReport callable for the search."""
    def objective(z):
        return evaluate(z, endpoint, spec)
    return objective

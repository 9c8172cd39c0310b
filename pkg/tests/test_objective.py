import math

import numpy as np
import pytest

from aevo.aesthetics import FeatureId, FeatureValue
from aevo.genesis import BuiltinEndpoint
from aevo.objective import (ConstraintMode, Direction, FitnessReport, ObjectiveSpec,
                            ObjectiveSpecError, combined_fitness, cutoff, evaluate,
                            feature_term, make_objective, realness_factor)


def spec_for(*terms, **kwargs):
    return ObjectiveSpec(terms=tuple(terms), **kwargs)

HUE_MIN = spec_for((FeatureId.HUE, Direction.MINIMIZE))


class TestCutoff:
    def test_above(self):
        assert cutoff(0.5, 0.02, 0.0) == 0.5

    def test_below_returns_stable(self):
        assert cutoff(0.01, 0.02, 0.0) == 0.0

    def test_boundary_inclusive(self):
        assert cutoff(0.02, 0.02, 0.0) == 0.02


class TestFeatureTerm:
    def test_minimize_is_identity(self):
        assert feature_term(FeatureValue(FeatureId.HUE, 0.3), Direction.MINIMIZE, HUE_MIN) == 0.3

    def test_maximize_is_complement(self):
        assert feature_term(FeatureValue(FeatureId.HUE, 0.3), Direction.MAXIMIZE, HUE_MIN) == 0.7

    def test_gcf_maximize_reciprocal(self):
        spec = spec_for((FeatureId.GCF, Direction.MAXIMIZE))
        assert feature_term(FeatureValue(FeatureId.GCF, 0.0), Direction.MAXIMIZE, spec) == 1.0
        assert feature_term(FeatureValue(FeatureId.GCF, 1.0), Direction.MAXIMIZE, spec) == 0.5

    def test_gcf_minimize_scaled_and_clipped(self):
        spec = spec_for((FeatureId.GCF, Direction.MINIMIZE), gcf_scale=2.0)
        assert feature_term(FeatureValue(FeatureId.GCF, 1.0), Direction.MINIMIZE, spec) == 0.5
        assert feature_term(FeatureValue(FeatureId.GCF, 5.0), Direction.MINIMIZE, spec) == 1.0


class TestRealnessFactor:
    def test_below_cutoff_neutral(self):
        assert realness_factor(0.001, HUE_MIN) == 1.0

    def test_above_cutoff_grows(self):
        assert realness_factor(0.5, HUE_MIN) == 1.5

    def test_disabled_with_infinite_cutoff(self):
        spec = spec_for((FeatureId.HUE, Direction.MINIMIZE), cutoff_c=math.inf)
        assert realness_factor(0.5, spec) == 1.0

    def test_symmetric_in_sign(self):
        assert realness_factor(-0.5, HUE_MIN) == realness_factor(0.5, HUE_MIN)

    def test_always_at_least_one(self):
        for raw in (-3.0, -0.01, 0.0, 0.019, 0.02, 10.0):
            assert realness_factor(raw, HUE_MIN) >= 1.0


class TestObjectiveSpec:
    def test_rejects_duplicate_pair(self):
        with pytest.raises(ObjectiveSpecError):
            spec_for((FeatureId.HUE, Direction.MINIMIZE), (FeatureId.HUE, Direction.MAXIMIZE))

    def test_rejects_empty(self):
        with pytest.raises(ObjectiveSpecError):
            spec_for()

    def test_rejects_negative_cutoff(self):
        with pytest.raises(ObjectiveSpecError):
            spec_for((FeatureId.HUE, Direction.MINIMIZE), cutoff_c=-1.0)

    def test_accepts_string_terms(self):
        spec = ObjectiveSpec(terms=(("hue", "min"),))
        assert spec.terms == ((FeatureId.HUE, Direction.MINIMIZE),)


class TestCombinedFitness:
    def test_single_min_neutral(self):
        report = combined_fitness([FeatureValue(FeatureId.HUE, 0.3)], 0.0, HUE_MIN)
        assert report.fitness == 0.3
        assert report.realness_factor == 1.0

    def test_pair_product(self):
        spec = spec_for((FeatureId.SATURATION, Direction.MINIMIZE),
                        (FeatureId.SYMMETRY, Direction.MAXIMIZE))
        report = combined_fitness([FeatureValue(FeatureId.SATURATION, 0.2),
                                   FeatureValue(FeatureId.SYMMETRY, 0.5)], 0.0, spec)
        assert math.isclose(report.fitness, 0.1, rel_tol=1e-12)

    def test_pair_with_penalty(self):
        spec = spec_for((FeatureId.HUE, Direction.MAXIMIZE),
                        (FeatureId.SATURATION, Direction.MAXIMIZE))
        report = combined_fitness([FeatureValue(FeatureId.HUE, 0.4),
                                   FeatureValue(FeatureId.SATURATION, 0.25)], 0.2, spec)
        assert math.isclose(report.realness_factor, 1.2, rel_tol=1e-12)
        assert math.isclose(report.fitness, 0.6 * 0.75 * 1.2, rel_tol=1e-12)

    def test_term_count_mismatch(self):
        with pytest.raises(ObjectiveSpecError):
            combined_fitness([FeatureValue(FeatureId.HUE, 0.4)] * 2, 0.0, HUE_MIN)

    def test_discard_mode_rejects_unreal(self):
        spec = spec_for((FeatureId.HUE, Direction.MINIMIZE),
                        constraint_mode=ConstraintMode.DISCARD)
        report = combined_fitness([FeatureValue(FeatureId.HUE, 0.3)], 0.5, spec)
        assert math.isinf(report.fitness)

    def test_argmin_invariance(self, rng):
        # ranking by single-feature fitness equals ranking by raw value,
        # and is exactly reversed under Maximize
        values = rng.uniform(0, 1, size=50)
        spec_min = HUE_MIN
        spec_max = spec_for((FeatureId.HUE, Direction.MAXIMIZE))
        fit_min = [combined_fitness([FeatureValue(FeatureId.HUE, v)], 0.0, spec_min).fitness
                   for v in values]
        fit_max = [combined_fitness([FeatureValue(FeatureId.HUE, v)], 0.0, spec_max).fitness
                   for v in values]
        assert list(np.argsort(fit_min)) == list(np.argsort(values))
        assert list(np.argsort(fit_max)) == list(np.argsort(-values))

    def test_monotone_in_each_term(self, rng):
        spec = spec_for((FeatureId.HUE, Direction.MINIMIZE),
                        (FeatureId.SATURATION, Direction.MINIMIZE))
        base = combined_fitness([FeatureValue(FeatureId.HUE, 0.4),
                                 FeatureValue(FeatureId.SATURATION, 0.3)], 0.0, spec)
        worse = combined_fitness([FeatureValue(FeatureId.HUE, 0.6),
                                  FeatureValue(FeatureId.SATURATION, 0.3)], 0.0, spec)
        assert worse.fitness >= base.fitness


class TestEvaluate:
    def test_deterministic(self):
        ep = BuiltinEndpoint(image_size=(16, 16), seed=3)
        z = np.zeros(100)
        a = evaluate(z, ep, HUE_MIN)
        b = evaluate(z, ep, HUE_MIN)
        assert a == b

    def test_disabled_cutoff_gives_pure_feature_product(self):
        ep = BuiltinEndpoint(image_size=(16, 16), seed=3)
        spec = spec_for((FeatureId.HUE, Direction.MINIMIZE), cutoff_c=math.inf)
        z = np.ones(100)
        report = evaluate(z, ep, spec)
        assert report.realness_factor == 1.0
        assert report.fitness == report.feature_values[0].value

    def test_make_objective_binds(self):
        ep = BuiltinEndpoint(image_size=(16, 16), seed=3)
        objective = make_objective(ep, HUE_MIN)
        z = np.full(100, 0.1)
        assert isinstance(objective(z), FitnessReport)
        assert objective(z) == evaluate(z, ep, HUE_MIN)

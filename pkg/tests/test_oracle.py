"""The enumeration oracle itself: exactness, caps, Monte Carlo, normality."""

import math
from fractions import Fraction

import pytest

from causalurn import (
    EnumerationCapError,
    ObservedTable,
    ScienceTable,
    enumerate_assignments,
    lemma1_check,
    monte_carlo,
    normality_check,
    population_attributable_mse,
    population_tau_variance,
)
from causalurn.oracle import DEFAULT_ENUM_CAP, ENUM_CAP_ENV, enumeration_cap


class TestEnumerate:
    def test_three_equiprobable_outcomes(self):
        dist = enumerate_assignments(ScienceTable(1, 1, 0, 1), 1)
        assert len(dist.outcomes) == 3
        assert all(p == Fraction(1, 3) for p in dist.outcomes.values())

    def test_degenerate_science_single_outcome(self):
        dist = enumerate_assignments(ScienceTable(0, 0, 0, 4), 2)
        assert dist.outcomes == {ObservedTable(0, 2, 0, 2): Fraction(1)}

    def test_hand_case_moments(self):
        dist = enumerate_assignments(ScienceTable(1, 2, 0, 1), 2)
        mean, variance = dist.tau_hat_moments()
        assert (mean, variance) == (Fraction(1, 2), Fraction(1, 6))

    def test_probabilities_sum_to_one_exactly(self):
        dist = enumerate_assignments(ScienceTable(2, 3, 1, 2), 4)
        assert sum(dist.outcomes.values()) == 1
        assert sum(r.probability for r in dist.records) == 1

    def test_assignment_count(self):
        dist = enumerate_assignments(ScienceTable(2, 3, 1, 2), 4)
        assert dist.n_assignments == math.comb(8, 4)

    def test_cap_exceeded_instructs_monte_carlo(self):
        with pytest.raises(EnumerationCapError, match="monte_carlo"):
            enumerate_assignments(ScienceTable(10, 10, 5, 5), 15, cap=1000)

    def test_default_cap_allows_the_worked_example_scale(self):
        # C(53, 32) is astronomically over the cap.
        with pytest.raises(EnumerationCapError):
            enumerate_assignments(ScienceTable(13, 10, 0, 30), 32)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(ENUM_CAP_ENV, "10")
        assert enumeration_cap() == 10
        with pytest.raises(EnumerationCapError):
            enumerate_assignments(ScienceTable(2, 3, 1, 2), 4)
        monkeypatch.delenv(ENUM_CAP_ENV)
        assert enumeration_cap() == DEFAULT_ENUM_CAP

    def test_arm_validation(self):
        with pytest.raises(ValueError):
            enumerate_assignments(ScienceTable(1, 1, 0, 1), 3)


class TestMonteCarlo:
    def test_same_seed_same_distribution(self):
        science = ScienceTable(3, 4, 1, 5)
        a = monte_carlo(science, 6, draws=2000, seed=42)
        b = monte_carlo(science, 6, draws=2000, seed=42)
        assert a.records == b.records
        assert a.rng == b.rng

    def test_different_seed_differs(self):
        science = ScienceTable(3, 4, 1, 5)
        a = monte_carlo(science, 6, draws=2000, seed=1)
        b = monte_carlo(science, 6, draws=2000, seed=2)
        assert a.records != b.records

    def test_frequencies_sum_to_one(self):
        dist = monte_carlo(ScienceTable(3, 4, 1, 5), 6, draws=777, seed=5)
        assert sum(r.probability for r in dist.records) == 1
        assert dist.kind == "monte-carlo"
        assert dist.draws == 777

    def test_mean_near_tau_at_example_scale(self):
        # 10^5 draws from the no-harm table behind the worked example.
        science = ScienceTable(13, 10, 0, 30)
        dist = monte_carlo(science, 32, draws=100_000, seed=9)
        mean, _ = dist.tau_hat_moments()
        se = math.sqrt(population_tau_variance(science, 32) / 100_000)
        assert abs(float(mean - science.tau)) <= 4 * se

    def test_prediction_gap_variance_within_5_percent(self):
        science = ScienceTable(13, 10, 6, 24)
        dist = monte_carlo(science, 32, draws=1_000_000, seed=17)
        _, variance = dist.prediction_gap_moments()
        exact = population_attributable_mse(science, 32)
        assert abs(float(variance / exact) - 1) < 0.05


class TestLemma1:
    def test_three_point_hand_case(self):
        report = lemma1_check([1, 0, 0], 1)
        assert report.mean == Fraction(1, 3)
        assert report.variance == Fraction(2, 9)
        assert report.matches

    def test_constant_vector_has_zero_variance(self):
        report = lemma1_check([3, 3, 3, 3], 2)
        assert report.variance == 0
        assert report.matches

    def test_balanced_binary_case(self):
        assert lemma1_check([1, 1, 0, 0], 2).matches

    def test_fractional_constants(self):
        assert lemma1_check([0.5, 0.25, 1.0, 0.0, 2.0], 2).matches

    def test_cap(self):
        with pytest.raises(EnumerationCapError):
            lemma1_check(list(range(30)), 15, cap=100)


class TestNormalityCheck:
    def test_seed_determinism(self):
        science = ScienceTable(10, 10, 0, 20)
        a = normality_check(science, 20, draws=10_000, seed=3)
        b = normality_check(science, 20, draws=10_000, seed=3)
        assert a.ks_statistic == b.ks_statistic

    def test_degenerate_table_is_skipped(self):
        report = normality_check(ScienceTable(0, 0, 0, 40), 20, draws=10_000, seed=0)
        assert report.skipped
        assert report.ks_statistic is None

    def test_distance_shrinks_with_population(self):
        small = normality_check(ScienceTable(10, 10, 0, 20), 20, draws=20_000, seed=7)
        large = normality_check(ScienceTable(100, 100, 0, 200), 200, draws=20_000, seed=7)
        assert large.ks_statistic < small.ks_statistic

    def test_requires_enough_draws(self):
        with pytest.raises(ValueError):
            normality_check(ScienceTable(10, 10, 0, 20), 20, draws=100, seed=0)

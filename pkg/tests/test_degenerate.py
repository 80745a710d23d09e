import math

import numpy as np
import pytest
from scipy import stats

from bandtest.core import SortedSample, StepCdf
from bandtest.core.errors import DuplicateSampleError, NonMonotoneCdfError
from bandtest.core.sample import TiePolicy
from bandtest.statistics.degenerate import (
    GroupingPlan,
    degenerate_weights,
    evaluate_null,
    grouped_reference,
    grouped_statistic,
    normal_null,
    spacing_cdf,
    spacing_law,
    spacing_mean,
    spacing_pdf,
    step_null,
    uniform_null,
)


def test_uniform_null_weights_are_spacings() -> None:
    weights = degenerate_weights(SortedSample(np.array([0.2, 0.5, 0.9])), uniform_null())
    np.testing.assert_allclose(weights.w, [0.2, 0.3, 0.4], atol=1e-15)
    assert weights.sum_target == pytest.approx(0.9)


def test_single_point_weight() -> None:
    weights = degenerate_weights(SortedSample(np.array([0.35])), uniform_null())
    np.testing.assert_allclose(weights.w, [0.35])


def test_normal_null_symmetry() -> None:
    weights = degenerate_weights(SortedSample(np.array([0.0])), normal_null())
    np.testing.assert_allclose(weights.w, [0.5])


def test_step_null_from_reference_record() -> None:
    reference = StepCdf(np.array([0.0, 1.0, 2.0, 3.0]), np.array([0.25, 0.5, 0.75, 1.0]))
    weights = degenerate_weights(SortedSample(np.array([0.5, 2.5])), step_null(reference))
    np.testing.assert_allclose(weights.w, [0.25, 0.5])


def test_non_monotone_null_is_rejected() -> None:
    with pytest.raises(NonMonotoneCdfError):
        degenerate_weights(SortedSample(np.array([0.1, 0.9])), lambda x: 1.0 - np.asarray(x))


def test_null_values_must_be_probabilities() -> None:
    with pytest.raises(ValueError):
        evaluate_null(lambda x: 2.0 * np.asarray(x), np.array([0.9]))


@pytest.mark.parametrize("sd", [0.0, -1.0])
def test_normal_null_rejects_bad_sd(sd: float) -> None:
    with pytest.raises(ValueError):
        normal_null(0.0, sd)


def test_single_group_matches_direct_statistic() -> None:
    raw = np.array([0.9, 0.2, 0.5, 0.7])
    statistic = grouped_statistic(raw, uniform_null(), GroupingPlan.identity(1, 4))
    w = np.array([0.2, 0.3, 0.2, 0.2])
    assert statistic == pytest.approx(-float(np.mean(np.log(4 * w))))


def test_grouping_plan_validation() -> None:
    with pytest.raises(ValueError):
        GroupingPlan(2, 2, np.array([0, 1, 1, 3]))
    with pytest.raises(ValueError):
        GroupingPlan(2, 2, np.arange(3))
    with pytest.raises(ValueError):
        GroupingPlan(0, 2, np.empty(0, dtype=np.int64))
    plan = GroupingPlan.random(3, 4, np.random.default_rng(0))
    assert plan.n == 12
    assert sorted(plan.assignment) == list(range(12))


def test_plan_length_must_match_data() -> None:
    with pytest.raises(ValueError):
        grouped_statistic(np.arange(5.0) / 10, uniform_null(), GroupingPlan.identity(2, 2))


def test_group_ties_follow_policy() -> None:
    raw = np.array([0.3, 0.3, 0.1, 0.6])
    with pytest.raises(DuplicateSampleError):
        grouped_statistic(raw, uniform_null(), GroupingPlan.identity(2, 2))
    statistic = grouped_statistic(raw, uniform_null(), GroupingPlan.identity(1, 4), TiePolicy.JITTER)
    assert math.isfinite(statistic)


def test_two_sided_centres_on_reference() -> None:
    raw = np.random.default_rng(1).uniform(size=40)
    plan = GroupingPlan.identity(4, 10)
    one_sided = grouped_statistic(raw, uniform_null(), plan)
    two_sided = grouped_statistic(raw, uniform_null(), plan, two_sided=True)
    assert two_sided == pytest.approx(abs(one_sided - math.log(1.1)))


def test_single_observation_groups_approach_log_two() -> None:
    rng = np.random.default_rng(21)
    k = 100_000
    statistic = grouped_statistic(rng.uniform(size=k), uniform_null(), GroupingPlan.identity(k, 1))
    assert statistic == pytest.approx(math.log(2.0), abs=0.01)


def test_grouped_statistic_converges_to_reference() -> None:
    rng = np.random.default_rng(8)
    k, m = 100_000, 10
    raw = rng.normal(size=k * m)
    statistic = grouped_statistic(raw, normal_null(), GroupingPlan.random(k, m, rng))
    assert grouped_reference(m) == pytest.approx(0.095310, abs=1e-6)
    assert statistic == pytest.approx(grouped_reference(m), rel=0.01)


@pytest.mark.slow
def test_grouping_reduces_variance() -> None:
    rng = np.random.default_rng(13)
    null = uniform_null()
    grouped = [grouped_statistic(rng.uniform(size=100), null, GroupingPlan.identity(10, 10)) for _ in range(2000)]
    single = [grouped_statistic(rng.uniform(size=100), null, GroupingPlan.identity(1, 100)) for _ in range(2000)]
    assert np.var(grouped) < np.var(single)


@pytest.mark.parametrize("w,expected", [(0.0, 0.0), (1.0, 1.0), (0.3, 0.3)])
def test_spacing_cdf_single_draw(w: float, expected: float) -> None:
    assert spacing_cdf(1, w) == pytest.approx(expected)


def test_spacing_cdf_closed_form() -> None:
    assert spacing_cdf(4, 0.5) == pytest.approx(0.9375)
    assert spacing_pdf(4, 0.5) == pytest.approx(4 * 0.125)
    assert spacing_pdf(3, 1.5) == 0.0
    assert spacing_mean(9) == pytest.approx(0.1)
    assert spacing_law(4).cdf(0.5) == pytest.approx(0.9375)


def test_spacing_functions_reject_empty_sample() -> None:
    with pytest.raises(ValueError):
        spacing_cdf(0, 0.5)
    with pytest.raises(ValueError):
        spacing_law(0)


@pytest.mark.parametrize("n", [1, 5, 10, 50])
def test_simulated_spacings_follow_closed_form(n: int) -> None:
    rng = np.random.default_rng(n)
    draws = 100_000
    null = normal_null()
    spacings = np.empty(draws)
    position = rng.integers(0, n, size=draws)
    for start in range(0, draws, 10_000):
        block = np.sort(rng.normal(size=(10_000, n)), axis=1)
        levels = np.diff(np.concatenate((np.zeros((10_000, 1)), null(block)), axis=1), axis=1)
        spacings[start : start + 10_000] = levels[np.arange(10_000), position[start : start + 10_000]]
    distance = stats.kstest(spacings, lambda w: spacing_cdf(n, w)).statistic
    assert distance < 0.01
    standard_error = float(np.std(spacings)) / math.sqrt(draws)
    assert abs(float(np.mean(spacings)) - spacing_mean(n)) <= 3 * standard_error

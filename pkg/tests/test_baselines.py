import math

import numpy as np
import pytest
from oracles import elrm_lattice_oracle, monotone_box_qp_oracle, random_band, random_sample, robust_ks_oracle

from bandtest.core import CdfBand, Hypothesis, SortedSample, StepCdf, merged_knots
from bandtest.core.errors import InfeasibleMomentError, ZeroVarianceError
from bandtest.statistics.baselines import (
    MOMENT_FUNCTIONS,
    MomentConstraint,
    cvm_statistic,
    elrm_statistic,
    elrm_weights,
    ks_decide,
    ks_normality_statistic,
    ks_statistic,
    robust_cvm_fit,
    robust_cvm_statistic,
    robust_ks_statistic,
    step_distance,
)
from bandtest.statistics.degenerate import uniform_null

UNIFORM_GRID = np.round(np.arange(1, 1001) / 1000, 12)


def _identity(x: np.ndarray) -> np.ndarray:
    return x


def test_robust_ks_zero_inside_band() -> None:
    sample = SortedSample(np.array([0.1, 0.4, 0.8]))
    assert robust_ks_statistic(sample, CdfBand.vacuous()) == 0.0


def test_robust_ks_degenerate_uniform_band() -> None:
    band = CdfBand.degenerate(StepCdf(UNIFORM_GRID, UNIFORM_GRID))
    assert robust_ks_statistic(SortedSample(np.array([0.3])), band) == pytest.approx(0.7, abs=1e-12)


def test_robust_ks_matches_inf_sup_oracle() -> None:
    rng = np.random.default_rng(99)
    for _ in range(100):
        n = int(rng.choice([2, 4, 5, 8, 10]))
        sample = random_sample(rng, n)
        band = random_band(rng)
        assert robust_ks_statistic(sample, band) == pytest.approx(robust_ks_oracle(sample, band), abs=1e-9)


def test_robust_ks_is_an_infimum() -> None:
    rng = np.random.default_rng(17)
    for _ in range(20):
        sample = random_sample(rng, 6)
        band = random_band(rng)
        statistic = robust_ks_statistic(sample, band)
        knots = merged_knots(band.lower, band.upper)
        lo = band.lower.eval_right(knots)
        hi = band.upper.eval_right(knots)
        for _ in range(50):
            levels = np.maximum.accumulate(lo + rng.uniform(size=knots.size) * (hi - lo))
            candidate = StepCdf(knots, levels)
            assert band.contains(candidate)
            assert step_distance(sample, candidate) >= statistic - 1e-12


@pytest.mark.parametrize(
    "d_n,n,gamma,expected",
    [(0.0, 10, 0.5, Hypothesis.H0), (0.7, 1, 0.5, Hypothesis.H1), (0.1, 100, 1.0, Hypothesis.H0)],
    ids=["zero", "above", "boundary"],
)
def test_ks_decide(d_n: float, n: int, gamma: float, expected: Hypothesis) -> None:
    assert ks_decide(d_n, n, gamma) is expected


@pytest.mark.parametrize("n,gamma", [(0, 1.0), (5, 0.0)])
def test_ks_decide_rejects_bad_arguments(n: int, gamma: float) -> None:
    with pytest.raises(ValueError):
        ks_decide(0.1, n, gamma)


@pytest.mark.parametrize("n", [1, 3, 10])
def test_robust_cvm_vacuous_band(n: int) -> None:
    sample = SortedSample(np.arange(1.0, n + 1))
    assert robust_cvm_statistic(sample, CdfBand.vacuous()) == pytest.approx(1.0 / (12 * n), abs=1e-15)


def test_robust_cvm_vacuous_value_for_ten_points() -> None:
    sample = SortedSample(np.linspace(0.0, 1.0, 10))
    assert robust_cvm_statistic(sample, CdfBand.vacuous()) == pytest.approx(0.0083333, abs=1e-7)


def test_robust_cvm_single_point_projection() -> None:
    band = CdfBand(
        StepCdf(np.array([0.0]), np.array([0.2])),
        StepCdf(np.array([0.0, 1.0]), np.array([0.4, 1.0])),
    )
    sample = SortedSample(np.array([0.5]))
    np.testing.assert_allclose(robust_cvm_fit(sample, band), [0.4])
    assert robust_cvm_statistic(sample, band) == pytest.approx(1.0 / 12.0 + 0.01, abs=1e-12)
    assert robust_cvm_statistic(sample, band) == pytest.approx(0.0933333, abs=1e-7)


def test_robust_cvm_matches_monotone_qp() -> None:
    rng = np.random.default_rng(31)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        sample = random_sample(rng, n)
        band = random_band(rng)
        targets = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
        lo = band.lower.eval_right(sample.values)
        hi = band.upper.eval_right(sample.values)
        expected = monotone_box_qp_oracle(targets, lo, hi)
        np.testing.assert_allclose(robust_cvm_fit(sample, band), expected, atol=1e-9)


def test_classical_statistics_against_uniform() -> None:
    sample = SortedSample(np.array([0.3]))
    assert ks_statistic(sample, uniform_null()) == pytest.approx(0.7)
    assert cvm_statistic(SortedSample(np.array([0.5])), uniform_null()) == pytest.approx(1.0 / 12.0)


def test_elrm_zero_when_mean_inside() -> None:
    sample = SortedSample(np.array([-1.0, 0.0, 1.0]))
    assert elrm_statistic(sample, MomentConstraint(_identity, -0.5, 0.5)) == 0.0


def test_elrm_pinned_two_point_case() -> None:
    sample = SortedSample(np.array([0.0, 1.0]))
    constraint = MomentConstraint(_identity, 0.7, 0.7)
    expected = -0.5 * (math.log(0.6) + math.log(1.4))
    assert elrm_statistic(sample, constraint) == pytest.approx(expected, abs=1e-9)
    assert elrm_statistic(sample, constraint) == pytest.approx(0.087177, abs=1e-6)
    np.testing.assert_allclose(elrm_weights(sample, constraint), [0.3, 0.7], atol=1e-9)


def test_elrm_weights_satisfy_constraint() -> None:
    sample = SortedSample(np.array([-2.0, -0.5, 0.1, 0.4, 3.0]))
    constraint = MomentConstraint(_identity, 0.8, 1.2)
    w = elrm_weights(sample, constraint)
    assert float(np.sum(w)) == pytest.approx(1.0, abs=1e-10)
    assert float(w @ sample.values) == pytest.approx(0.8, abs=1e-9)
    assert elrm_statistic(sample, constraint) == pytest.approx(-float(np.mean(np.log(5 * w))), abs=1e-10)


def test_elrm_outside_hull_raises() -> None:
    with pytest.raises(InfeasibleMomentError):
        elrm_statistic(SortedSample(np.array([0.0, 1.0])), MomentConstraint(_identity, 1.5, 2.0))


def test_elrm_on_hull_boundary_is_infinite() -> None:
    sample = SortedSample(np.array([0.0, 0.5, 1.0]))
    constraint = MomentConstraint(_identity, 1.0, 1.0)
    assert math.isinf(elrm_statistic(sample, constraint))
    np.testing.assert_array_equal(elrm_weights(sample, constraint), [0.0, 0.0, 1.0])


def test_moment_bounds_are_normalized() -> None:
    constraint = MomentConstraint(_identity, 0.9, 0.1)
    assert (constraint.lower, constraint.upper) == (0.1, 0.9)


def test_elrm_is_continuous_at_the_feasibility_edge() -> None:
    sample = SortedSample(np.array([0.0, 0.2, 0.9]))
    mean = float(np.mean(sample.values))
    assert elrm_statistic(sample, MomentConstraint(_identity, mean + 1e-6, 1.0)) < 1e-9


def test_elrm_matches_lattice_oracle() -> None:
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 40:
        n = int(rng.choice([2, 3]))
        values = np.sort(rng.uniform(-1.0, 1.0, size=n))
        g = MOMENT_FUNCTIONS["square"] if checked % 2 else MOMENT_FUNCTIONS["mean"]
        g_values = g(values)
        mean = float(np.mean(g_values))
        target = rng.uniform(float(np.min(g_values)), float(np.max(g_values)))
        lower, upper = (target, target + 0.1) if target > mean else (target - 0.1, target)
        statistic = elrm_statistic(SortedSample(values), MomentConstraint(g, lower, upper))
        if not math.isfinite(statistic) or statistic > 0.3:
            continue
        checked += 1
        oracle = elrm_lattice_oracle(g_values, lower, upper)
        assert statistic <= oracle + 1e-9
        assert oracle - statistic <= 5e-3


def test_normality_statistic_two_points() -> None:
    assert ks_normality_statistic([-1.0, 1.0]) == pytest.approx(0.341345, abs=1e-6)


def test_normality_statistic_is_affine_invariant() -> None:
    x = np.random.default_rng(2).normal(size=25)
    assert ks_normality_statistic(3.5 * x - 7.0) == pytest.approx(ks_normality_statistic(x), abs=1e-12)


def test_normality_statistic_rejects_degenerate_input() -> None:
    with pytest.raises(ZeroVarianceError):
        ks_normality_statistic([2.0, 2.0, 2.0])
    with pytest.raises(ValueError):
        ks_normality_statistic([1.0])


def test_normality_statistic_shrinks_with_n() -> None:
    rng = np.random.default_rng(12)
    small = np.median([ks_normality_statistic(rng.normal(size=10)) for _ in range(300)])
    large = np.median([ks_normality_statistic(rng.normal(size=100)) for _ in range(300)])
    assert large < small

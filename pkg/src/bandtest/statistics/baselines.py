"""
Competitor goodness-of-fit statistics.

The robust Kolmogorov-Smirnov and Cramer-von Mises statistics take the infimum of
the classical discrepancy over every CDF in the band. Both infima are attained by
clipping a monotone target into the band, so no optimizer is needed.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import numpy.typing as npt
from scipy import stats
from scipy.optimize import brentq

from bandtest.core.arrays import PROB_TOL, FloatArray, as_float_array
from bandtest.core.band import CdfBand
from bandtest.core.decision import Hypothesis, decide
from bandtest.core.errors import (
    INFEASIBLE_BAND_ERROR,
    INFEASIBLE_MOMENT_ERROR,
    ZERO_VARIANCE_ERROR,
    InfeasibleBandError,
    InfeasibleMomentError,
    ZeroVarianceError,
)
from bandtest.core.sample import SortedSample
from bandtest.core.step_cdf import StepCdf, ecdf, merged_knots
from bandtest.statistics.degenerate import NullCdf, evaluate_null
from bandtest.utils.logger import logger

# Relative distance kept from the poles of the moment root function.
ROOT_BRACKET_SHRINK = 1e-12


@dataclass(frozen=True)
class MomentConstraint:
    """Scalar moment constraint lower <= sum(w_i g(X_i)) <= upper."""

    g: Callable[[FloatArray], FloatArray]
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            logger.warning(f"Moment bounds given in reverse order ({self.lower}, {self.upper}); swapping them")
            lower, upper = self.upper, self.lower
            object.__setattr__(self, "lower", lower)
            object.__setattr__(self, "upper", upper)


MOMENT_FUNCTIONS: dict[str, Callable[[FloatArray], FloatArray]] = {
    "mean": lambda x: x,
    "square": np.square,
    "abs": np.abs,
}


def robust_ks_statistic(sample: SortedSample, band: CdfBand) -> float:
    """
    inf over F in the band of sup_x |F_e(x) - F(x)|.

    Clipping F_e into the band attains the infimum, so the statistic is the
    largest excursion of F_e outside the band. Right values and left limits at
    every merged knot cover the whole line.

    Args:
        sample: Sorted observations
        band: Null band

    Returns:
        Robust KS distance D_n
    """
    empirical = ecdf(sample)
    knots = merged_knots(empirical, band.lower, band.upper)
    excursion = 0.0
    for evaluate in (StepCdf.eval_right, StepCdf.eval_left):
        fe = evaluate(empirical, knots)
        lo = evaluate(band.lower, knots)
        hi = evaluate(band.upper, knots)
        excursion = max(excursion, float(np.max(np.maximum(fe - hi, lo - fe))))
    return max(excursion, 0.0)


def ks_decide(d_n: float, n: int, gamma: float) -> Hypothesis:
    """Declare H1 iff sqrt(n) * D_n exceeds gamma."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return decide(math.sqrt(n) * d_n, gamma)


def _cvm_targets(n: int) -> FloatArray:
    return (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)


def robust_cvm_fit(sample: SortedSample, band: CdfBand) -> FloatArray:
    """
    CDF values at the sample points minimizing the Cramer-von Mises discrepancy.

    Targets (2i-1)/(2n) and both band edges are nondecreasing along the sorted
    sample, so their clip is nondecreasing too and the monotonicity rows of the
    quadratic program are never active.

    Raises:
        InfeasibleBandError: If the lower edge exceeds the upper edge at a sample point
    """
    lo = band.lower.eval_right(sample.values)
    hi = band.upper.eval_right(sample.values)
    if np.any(lo > hi + PROB_TOL):
        raise InfeasibleBandError(INFEASIBLE_BAND_ERROR.format("lower edge above upper edge at a sample point"))
    return np.clip(_cvm_targets(sample.n), lo, np.maximum(hi, lo))


def robust_cvm_statistic(sample: SortedSample, band: CdfBand) -> float:
    """inf over F in the band of 1/(12n) + sum(((2i-1)/(2n) - F(X_i))^2)."""
    fitted = robust_cvm_fit(sample, band)
    n = sample.n
    return 1.0 / (12.0 * n) + float(np.sum((_cvm_targets(n) - fitted) ** 2))


def ks_statistic(sample: SortedSample, null: NullCdf) -> float:
    """Classical KS distance to a continuous null, checked on both sides of each jump."""
    levels = evaluate_null(null, sample.values)
    i = np.arange(1, sample.n + 1)
    return float(max(np.max(i / sample.n - levels), np.max(levels - (i - 1) / sample.n)))


def cvm_statistic(sample: SortedSample, null: NullCdf) -> float:
    """Classical Cramer-von Mises statistic against a fully known null."""
    levels = evaluate_null(null, sample.values)
    n = sample.n
    return 1.0 / (12.0 * n) + float(np.sum((_cvm_targets(n) - levels) ** 2))


def elrm_statistic(sample: SortedSample, constraint: MomentConstraint) -> float:
    """
    Empirical likelihood statistic under a scalar moment interval.

    When the sample mean of g already lies in the interval the uniform weights are
    feasible and the statistic is 0. Otherwise the nearer endpoint mu binds and the
    weights take the form w_i = 1 / (n (1 + lam (g_i - mu))) with lam the root of
    sum(w_i (g_i - mu)) = 0.

    Args:
        sample: Sorted observations
        constraint: Moment function and its interval

    Returns:
        -(1/n) sum(log(n w_i)), +inf when mu sits on the hull boundary

    Raises:
        InfeasibleMomentError: If mu lies outside the convex hull of the g values
    """
    values = np.asarray(constraint.g(sample.values), dtype=np.float64)
    mean = float(np.mean(values))
    if constraint.lower <= mean <= constraint.upper:
        return 0.0

    mu = constraint.lower if mean < constraint.lower else constraint.upper
    g_min, g_max = float(np.min(values)), float(np.max(values))
    if mu < g_min or mu > g_max:
        raise InfeasibleMomentError(INFEASIBLE_MOMENT_ERROR.format(mu, g_min, g_max))
    if mu in (g_min, g_max):
        return math.inf

    z = values - mu
    return float(np.mean(np.log1p(_elrm_multiplier(z) * z)))


def _elrm_multiplier(z: FloatArray) -> float:
    """Root of sum(z / (1 + lam z)) inside the interval where every 1 + lam z is positive."""
    lam_low = -1.0 / float(np.max(z))
    lam_high = -1.0 / float(np.min(z))
    margin = ROOT_BRACKET_SHRINK * (lam_high - lam_low)

    def score(lam: float) -> float:
        return float(np.sum(z / (1.0 + lam * z)))

    lam = brentq(score, lam_low + margin, lam_high - margin, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(lam)


def elrm_weights(sample: SortedSample, constraint: MomentConstraint) -> FloatArray:
    """Weights attaining `elrm_statistic` (uniform when the interval already holds the mean)."""
    statistic = elrm_statistic(sample, constraint)
    n = sample.n
    if statistic == 0.0:
        return np.full(n, 1.0 / n)
    values = np.asarray(constraint.g(sample.values), dtype=np.float64)
    mu = constraint.lower if float(np.mean(values)) < constraint.lower else constraint.upper
    z = values - mu
    if math.isinf(statistic):
        # Only the points with g = mu can carry mass.
        on_boundary = z == 0
        return on_boundary / float(np.count_nonzero(on_boundary))
    return 1.0 / (n * (1.0 + _elrm_multiplier(z) * z))


def ks_normality_statistic(raw: "npt.ArrayLike") -> float:
    """
    KS distance between the ECDF and the Gaussian fitted by maximum likelihood.

    Args:
        raw: Observations, at least two

    Returns:
        sup_x |F_e(x) - Phi((x - mean) / sd)| with the divisor-n standard deviation

    Raises:
        ZeroVarianceError: If all observations are equal
    """
    x = np.sort(as_float_array(raw))
    n = x.size
    if n < 2:
        raise ValueError("Normality statistic needs at least two observations")
    sd = float(np.std(x))
    if sd == 0.0:
        raise ZeroVarianceError(ZERO_VARIANCE_ERROR)
    levels = stats.norm.cdf((x - float(np.mean(x))) / sd)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - levels), np.max(levels - (i - 1) / n)))


def step_distance(sample: SortedSample, cdf: StepCdf) -> float:
    """sup_x |F_e(x) - G(x)| for a step CDF G, exact over the merged knots."""
    empirical = ecdf(sample)
    knots = merged_knots(empirical, cdf)
    right = np.abs(empirical.eval_right(knots) - cdf.eval_right(knots))
    left = np.abs(empirical.eval_left(knots) - cdf.eval_left(knots))
    return float(max(np.max(right), np.max(left)))

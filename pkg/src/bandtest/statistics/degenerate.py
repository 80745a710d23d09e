"""
ELRDF under a degenerate (fully known) null CDF.

When the band collapses onto a single CDF F, the maximizing weights are the
spacings F(X_i) - F(X_{i-1}) of the ordered sample and no optimization is needed.
Under the null each spacing follows a Beta(1, n) law, which also drives the grouped
statistic's limit log(1 + 1/m).
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Union

import numpy as np
import numpy.typing as npt
from scipy import stats

from bandtest.core.arrays import PROB_TOL, FloatArray, as_float_array
from bandtest.core.errors import (
    DUPLICATE_SAMPLE_ERROR,
    NON_MONOTONE_CDF_ERROR,
    DuplicateSampleError,
    NonMonotoneCdfError,
)
from bandtest.core.sample import SortedSample, TiePolicy
from bandtest.core.step_cdf import StepCdf
from bandtest.core.weights import WeightVector
from bandtest.utils.logger import logger

NullCdf = Callable[[FloatArray], FloatArray]


def normal_null(mean: float = 0.0, sd: float = 1.0) -> NullCdf:
    """Gaussian null CDF."""
    if sd <= 0:
        raise ValueError("sd must be positive")
    law = stats.norm(loc=mean, scale=sd)
    return lambda x: np.asarray(law.cdf(x), dtype=np.float64)


def uniform_null(low: float = 0.0, high: float = 1.0) -> NullCdf:
    """Uniform null CDF on [low, high]."""
    if not low < high:
        raise ValueError("uniform null needs low < high")
    law = stats.uniform(loc=low, scale=high - low)
    return lambda x: np.asarray(law.cdf(x), dtype=np.float64)


def step_null(cdf: StepCdf) -> NullCdf:
    """Null given by a step CDF, e.g. the ECDF of a reference noise record."""
    return lambda x: np.asarray(cdf.eval_right(np.asarray(x, dtype=np.float64)), dtype=np.float64)


def evaluate_null(null: NullCdf, x: FloatArray) -> FloatArray:
    """Evaluate a null CDF and check that its values are probabilities."""
    values = np.asarray(null(x), dtype=np.float64)
    if values.shape != np.shape(x):
        raise ValueError("Null CDF must be vectorized")
    if np.any(values < -PROB_TOL) or np.any(values > 1 + PROB_TOL):
        raise ValueError("Null CDF returned values outside [0, 1]")
    return np.clip(values, 0.0, 1.0)


def degenerate_weights(sample: SortedSample, null: NullCdf) -> WeightVector:
    """
    Spacing weights w_1 = F(X_1), w_i = F(X_i) - F(X_{i-1}).

    The weights sum to F(X_n) instead of one.

    Args:
        sample: Sorted observations
        null: Fully known null CDF

    Returns:
        WeightVector with sum target F(X_n)

    Raises:
        NonMonotoneCdfError: If the null CDF decreases along the sample
    """
    levels = evaluate_null(null, sample.values)
    w = np.diff(np.concatenate(([0.0], levels)))
    if np.any(w < -PROB_TOL):
        raise NonMonotoneCdfError(NON_MONOTONE_CDF_ERROR.format(float(np.min(w))))
    w = np.maximum(w, 0.0)
    return WeightVector(w, float(levels[-1]))


@dataclass(frozen=True)
class GroupingPlan:
    """
    Assignment of n = k * m observations to k groups of m.

    Observation `assignment[g * m + j]` lands in group g.
    """

    k: int
    m: int
    assignment: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        if self.k < 1 or self.m < 1:
            raise ValueError("Group count and group size must be positive")
        assignment = np.asarray(self.assignment, dtype=np.int64)
        if assignment.shape != (self.k * self.m,):
            raise ValueError(f"Assignment must have length k*m = {self.k * self.m}")
        if not np.array_equal(np.sort(assignment), np.arange(self.k * self.m)):
            raise ValueError("Assignment must be a permutation of the observation indices")
        assignment.setflags(write=False)
        object.__setattr__(self, "assignment", assignment)

    @property
    def n(self) -> int:
        return self.k * self.m

    @classmethod
    def identity(cls, k: int, m: int) -> "GroupingPlan":
        return cls(k, m, np.arange(k * m))

    @classmethod
    def random(cls, k: int, m: int, rng: np.random.Generator) -> "GroupingPlan":
        """Random assignment drawn from a recorded generator."""
        return cls(k, m, rng.permutation(k * m))


def grouped_statistic(
    raw: "npt.ArrayLike",
    null: NullCdf,
    plan: GroupingPlan,
    tie_policy: TiePolicy = TiePolicy.ERROR,
    two_sided: bool = False,
) -> float:
    """
    Averaged degenerate statistic -(1/m) sum_j log(m * mean_g w_gj).

    Each group is sorted, its spacings under the null are computed, and the
    spacings are averaged across groups position by position. Under the null the
    statistic concentrates at log(1 + 1/m).

    Args:
        raw: Observations in acquisition order, length k*m
        null: Fully known null CDF
        plan: Grouping of the observations
        tie_policy: Handling of exact ties inside a group
        two_sided: Return |statistic - log(1 + 1/m)| instead

    Returns:
        The statistic, +inf if an averaged spacing is zero

    Raises:
        NonMonotoneCdfError: If the null CDF decreases inside a group
        DuplicateSampleError: If a group contains ties under the `error` policy
    """
    values = as_float_array(raw)
    if values.size != plan.n:
        raise ValueError(f"Plan covers {plan.n} observations, got {values.size}")

    groups = np.sort(values[plan.assignment].reshape(plan.k, plan.m), axis=1)
    if plan.m > 1:
        tied = np.diff(groups, axis=1) <= 0
        if np.any(tied):
            if TiePolicy(tie_policy) is TiePolicy.ERROR:
                raise DuplicateSampleError(DUPLICATE_SAMPLE_ERROR.format(groups[:, 1:][tied][0]))
            groups = _jitter_rows(groups)

    levels = evaluate_null(null, groups)
    spacings = np.diff(np.concatenate((np.zeros((plan.k, 1)), levels), axis=1), axis=1)
    if np.any(spacings < -PROB_TOL):
        raise NonMonotoneCdfError(NON_MONOTONE_CDF_ERROR.format(float(np.min(spacings))))

    averaged = np.maximum(spacings, 0.0).mean(axis=0)
    if np.any(averaged <= 0):
        statistic = math.inf
    else:
        statistic = -float(np.mean(np.log(plan.m * averaged)))

    if two_sided:
        return abs(statistic - grouped_reference(plan.m))
    return statistic


def grouped_reference(m: int) -> float:
    """Null limit log(1 + 1/m) of the grouped statistic."""
    return math.log1p(1.0 / m)


def _jitter_rows(groups: FloatArray) -> FloatArray:
    logger.debug("Jittering ties inside groups")
    groups = groups.copy()
    for row in groups:
        for j in range(1, row.size):
            if row[j] <= row[j - 1]:
                row[j] = np.nextafter(row[j - 1], np.inf)
    return groups


def spacing_cdf(n: int, w: Union[float, FloatArray]) -> Union[float, FloatArray]:
    """
    CDF 1 - (1 - w)^n of one spacing of n uniform order statistics.

    Args:
        n: Sample size, at least 1
        w: Probability level(s) in [0, 1]
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    value = 1.0 - np.power(1.0 - np.clip(w, 0.0, 1.0), n)
    return float(value) if np.ndim(value) == 0 else np.asarray(value)


def spacing_pdf(n: int, w: Union[float, FloatArray]) -> Union[float, FloatArray]:
    """Density n (1 - w)^(n-1) on [0, 1]."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = np.asarray(w, dtype=np.float64)
    value = np.where((w >= 0) & (w <= 1), n * np.power(1.0 - np.clip(w, 0.0, 1.0), n - 1), 0.0)
    return float(value) if value.ndim == 0 else value


def spacing_mean(n: int) -> float:
    return 1.0 / (n + 1)


def spacing_law(n: int) -> Any:
    """The spacing law as a frozen scipy distribution, Beta(1, n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return stats.beta(1, n)

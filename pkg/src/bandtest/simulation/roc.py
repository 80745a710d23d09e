"""
Monte-Carlo ROC estimation.

Trials run on independent counter-based streams, so the statistics, and hence
the curve, are a pure function of the seed regardless of thread count.
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, TypeVar, Union

import numpy as np
from scipy.integrate import trapezoid

from bandtest.core.arrays import FloatArray, as_float_array
from bandtest.core.decision import Hypothesis
from bandtest.simulation.rng import stream_id, trial_stream
from bandtest.statistics.registry import StatisticFn
from bandtest.utils.fs_utils import resolve_threads
from bandtest.utils.logger import logger

DEFAULT_THRESHOLD_COUNT = 200

TrialGenerator = Callable[[np.random.Generator], FloatArray]
T = TypeVar("T")


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    pf: float
    pd: float


@dataclass(frozen=True)
class RocCurve:
    """
    Operating points of a detector swept over increasing thresholds.

    When `flipped` is set the raw curve lay below the chance line and the roles
    of false alarm and detection were swapped, so `auc` is at least 0.5.
    """

    points: tuple[RocPoint, ...]
    auc: float
    flipped: bool

    @property
    def thresholds(self) -> FloatArray:
        return np.array([p.threshold for p in self.points])

    @property
    def pf(self) -> FloatArray:
        return np.array([p.pf for p in self.points])

    @property
    def pd(self) -> FloatArray:
        return np.array([p.pd for p in self.points])


def parallel_map(func: Callable[[int], T], count: int, threads: Optional[int] = None) -> list[T]:
    """Order-preserving map of `func` over range(count) on a thread pool."""
    workers = threads if threads is not None else resolve_threads()
    if workers <= 1 or count <= 1:
        return [func(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, range(count)))


def run_trials(
    statistic_fn: StatisticFn,
    generator: TrialGenerator,
    hypothesis: Hypothesis,
    trials: int,
    seed: int,
    threads: Optional[int] = None,
) -> FloatArray:
    """
    Statistics of `trials` independent records under one hypothesis.

    Trial t draws its record and any auxiliary randomness from stream
    `stream_id(hypothesis, t)`.
    """

    def one_trial(t: int) -> float:
        rng = trial_stream(seed, stream_id(hypothesis, t))
        return float(statistic_fn(generator(rng), rng))

    return np.asarray(parallel_map(one_trial, trials, threads), dtype=np.float64)


def auto_thresholds(
    h0_stats: Union[Sequence[float], FloatArray],
    h1_stats: Union[Sequence[float], FloatArray],
    count: int = DEFAULT_THRESHOLD_COUNT,
) -> FloatArray:
    """
    Quantile-spaced thresholds over the pooled finite statistics.

    A sentinel just below the smallest finite value makes every statistic an
    exceedance; one just above the largest leaves only +inf statistics above it.

    Args:
        h0_stats: Statistics under H0
        h1_stats: Statistics under H1
        count: Number of quantile levels, at least 2

    Returns:
        Strictly increasing thresholds
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    pooled = np.concatenate((as_float_array(h0_stats), as_float_array(h1_stats)))
    if pooled.size == 0:
        raise ValueError("Statistics must not be empty")
    if np.any(np.isnan(pooled)):
        raise ValueError("Statistics contain NaN")

    finite = pooled[np.isfinite(pooled)]
    if finite.size == 0:
        finite = np.zeros(1)
    levels = np.unique(np.quantile(finite, np.linspace(0.0, 1.0, count)))
    below = np.nextafter(levels[0], -np.inf)
    above = np.nextafter(levels[-1], np.inf)
    return np.concatenate(([below], levels, [above]))


def roc_from_statistics(h0_stats: FloatArray, h1_stats: FloatArray, thresholds: FloatArray) -> RocCurve:
    """
    Build the curve from already computed statistics.

    p_F(t) and p_D(t) are the fractions of H0 and H1 statistics strictly above t.
    The AUC integrates the points sorted by p_F, anchored at (0, 0) and (1, 1).
    """
    thresholds = as_float_array(thresholds)
    if thresholds.size == 0:
        raise ValueError("thresholds must not be empty")
    if np.any(np.diff(thresholds) <= 0):
        raise ValueError("thresholds must be strictly increasing")

    pf = np.mean(h0_stats[:, None] > thresholds[None, :], axis=0)
    pd = np.mean(h1_stats[:, None] > thresholds[None, :], axis=0)
    auc = _area(pf, pd)

    flipped = auc < 0.5
    if flipped:
        logger.warning(f"ROC lies below the chance line (AUC={auc:.4f}); swapping detection and false alarm")
        pf, pd = pd, pf
        auc = _area(pf, pd)

    points = tuple(RocPoint(float(t), float(f), float(d)) for t, f, d in zip(thresholds, pf, pd))
    return RocCurve(points=points, auc=auc, flipped=flipped)


def _area(pf: FloatArray, pd: FloatArray) -> float:
    # Thresholds increase, so both rates decrease; reversing sorts by p_F.
    x = np.concatenate(([0.0], pf[::-1], [1.0]))
    y = np.concatenate(([0.0], pd[::-1], [1.0]))
    return float(trapezoid(y, x))


def sweep_roc(
    statistic_fn: StatisticFn,
    h0_gen: TrialGenerator,
    h1_gen: TrialGenerator,
    trials: int,
    thresholds: Optional[FloatArray] = None,
    seed: int = 0,
    threads: Optional[int] = None,
    threshold_count: int = DEFAULT_THRESHOLD_COUNT,
) -> RocCurve:
    """
    Estimate the ROC curve of a detector by Monte Carlo.

    Args:
        statistic_fn: Maps a record and its trial generator to a statistic
        h0_gen: Draws one H0 record from a trial generator
        h1_gen: Draws one H1 record from a trial generator
        trials: Records per hypothesis
        thresholds: Strictly increasing thresholds, chosen by `auto_thresholds` if None
        seed: Experiment seed
        threads: Worker threads, BANDTEST_THREADS if None
        threshold_count: Quantile levels used when thresholds are automatic

    Returns:
        The oriented RocCurve
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    h0_stats = run_trials(statistic_fn, h0_gen, Hypothesis.H0, trials, seed, threads)
    h1_stats = run_trials(statistic_fn, h1_gen, Hypothesis.H1, trials, seed, threads)
    logger.info(f"Finished {trials} trials per hypothesis")

    if thresholds is None:
        thresholds = auto_thresholds(h0_stats, h1_stats, threshold_count)
    return roc_from_statistics(h0_stats, h1_stats, thresholds)

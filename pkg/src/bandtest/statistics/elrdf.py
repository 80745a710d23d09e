"""
Empirical likelihood ratio test with distribution function constraints (ELRDF).

The weights w_1..w_n on the sorted sample are parameterized by their prefix sums
s_1..s_{n-1} (s_0 = 0, s_n = 1). In these variables the band constraint is a box
L <= s <= U and the log empirical likelihood sum(log(s_i - s_{i-1})) is strictly
concave with a tridiagonal Hessian, so every Newton step costs O(n).
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.linalg import solveh_banded

from bandtest.core.arrays import PROB_TOL, FloatArray, frozen
from bandtest.core.band import CdfBand
from bandtest.core.decision import Hypothesis, decide
from bandtest.core.errors import (
    INFEASIBLE_BAND_ERROR,
    MAX_ITERATIONS_ERROR,
    InfeasibleBandError,
    MaxIterationsExceededError,
)
from bandtest.core.sample import SortedSample
from bandtest.core.step_cdf import StepCdf
from bandtest.core.weights import WeightVector
from bandtest.utils.logger import logger

DEFAULT_TOL = 1e-8
INITIAL_TAU = 1.0
TAU_REDUCTION = 10.0
STAGE_TOL = 1e-8
MAX_ITERATIONS = 500
BACKTRACK_FACTOR = 0.5
ARMIJO_SLOPE = 1e-4
# Every logarithm argument keeps at least this fraction of its current value per step.
BOUNDARY_FRACTION = 0.01
ACTIVE_TOL = 1e-7
POLISH_ITERATIONS = 50


class Feasibility(str, Enum):
    """Classification of the tightened constraint box."""

    INTERIOR_FEASIBLE = "InteriorFeasible"
    BOUNDARY_ONLY = "BoundaryOnly"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class TightenedBounds:
    """
    Box bounds on the cumulative weights s_1..s_{n-1}.

    `lower` is the running maximum of the band's lower edge at the sample points and
    `upper` the running minimum from the right of its upper edge, capped at 1.
    Coordinates whose bounds coincide are pinned.
    """

    lower: FloatArray
    upper: FloatArray
    feasibility: Feasibility

    @property
    def pinned(self) -> FloatArray:
        return self.upper - self.lower <= PROB_TOL

    def uniform_feasible(self) -> bool:
        """True when the uniform cumulative i/n lies inside every box."""
        n = self.lower.size + 1
        s = np.arange(1, n) / n
        return bool(np.all(self.lower <= s + PROB_TOL) and np.all(s <= self.upper + PROB_TOL))


@dataclass(frozen=True)
class ElrdfResult:
    """Maximizing weights and the resulting ELRDF statistic."""

    weights: WeightVector
    statistic: float
    kkt_residual: float
    iterations: int
    sample: Optional[SortedSample] = field(default=None, compare=False)

    def fitted_cdf(self) -> StepCdf:
        """Maximizing CDF: cumulative weights placed on the sample points."""
        if self.sample is None:
            raise ValueError("Result was built without its sample")
        return StepCdf(self.sample.values.copy(), np.minimum(self.weights.cumulative, 1.0))


def tighten_bounds(sample: SortedSample, band: CdfBand) -> TightenedBounds:
    """
    Turn the band into per-coordinate bounds on the cumulative weights.

    Monotonicity of s makes lower(X_k) a bound for every s_i with i >= k and
    upper(X_j) a bound for every s_i with i <= j; the running max/min absorbs
    those redundant rows so only a box remains.

    Args:
        sample: Sorted observations
        band: CDF band describing the null hypothesis

    Returns:
        TightenedBounds with the feasibility classification
    """
    x = sample.values[:-1]
    if x.size == 0:
        empty = frozen(np.empty(0))
        return TightenedBounds(empty, empty, Feasibility.INTERIOR_FEASIBLE)

    lower = np.maximum(np.maximum.accumulate(band.lower.eval_right(x)), 0.0)
    upper = np.minimum(np.minimum.accumulate(band.upper.eval_right(x)[::-1])[::-1], 1.0)
    return TightenedBounds(frozen(lower), frozen(upper), classify_feasibility(lower, upper))


def classify_feasibility(lower: FloatArray, upper: FloatArray) -> Feasibility:
    """
    Classify a box of cumulative bounds.

    A weight w_{i+1} is forced to zero exactly when U_{i+1} <= L_i, with the
    sentinels L_0 = U_0 = 0 and L_n = U_n = 1.
    """
    if np.any(lower > upper + PROB_TOL):
        return Feasibility.INFEASIBLE
    ext_lower = np.concatenate(([0.0], lower, [1.0]))
    ext_upper = np.concatenate(([0.0], upper, [1.0]))
    if np.any(ext_upper[1:] - ext_lower[:-1] <= PROB_TOL):
        return Feasibility.BOUNDARY_ONLY
    return Feasibility.INTERIOR_FEASIBLE


def cumulative_objective(s: FloatArray) -> float:
    """Log empirical likelihood sum(log(s_i - s_{i-1})) with s_0 = 0 and s_n = 1."""
    d = np.diff(np.concatenate(([0.0], s, [1.0])))
    if np.any(d <= 0):
        return -math.inf
    return float(np.sum(np.log(d)))


def cumulative_gradient(s: FloatArray) -> FloatArray:
    """Gradient of `cumulative_objective` with respect to s_1..s_{n-1}."""
    d = np.diff(np.concatenate(([0.0], s, [1.0])))
    return 1.0 / d[:-1] - 1.0 / d[1:]


def elrdf_statistic(w: WeightVector) -> float:
    """
    ELRDF statistic -(1/n) log prod(n w_i), the KL divergence D(F_e || w).

    Args:
        w: Weights summing to one

    Returns:
        Nonnegative statistic, +inf when some weight is zero
    """
    if abs(w.sum_target - 1.0) > PROB_TOL:
        raise ValueError("ELRDF statistic needs weights summing to one")
    if np.any(w.w <= 0):
        return math.inf
    # Uniform weights are the unconstrained maximizer.
    if np.all(w.w == w.w[0]):
        return 0.0
    n = w.n
    return max(0.0, -float(np.mean(np.log(n * w.w))))


def elrdf_decide(statistic: float, eta: float) -> Hypothesis:
    """Declare H1 iff the statistic exceeds eta >= 0."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    return decide(statistic, eta)


class _BarrierProblem:
    """Log-barrier subproblem over the non-pinned cumulative coordinates."""

    def __init__(self, bounds: TightenedBounds):
        self.lower = np.asarray(bounds.lower)
        self.upper = np.asarray(bounds.upper)
        self.pinned = np.asarray(bounds.pinned)
        self.free = ~self.pinned
        self.m = self.lower.size

    def initial_point(self) -> FloatArray:
        # Convex combination with strictly increasing weights t_i = i/n keeps s strictly
        # increasing unless a weight is forced to zero, and free coordinates strictly inside.
        t = np.arange(1, self.m + 1) / (self.m + 1)
        s = (1.0 - t) * self.lower + t * self.upper
        s[self.pinned] = self.lower[self.pinned]
        return s

    def value(self, s: FloatArray, tau: float) -> float:
        base = cumulative_objective(s)
        gap_l = s[self.free] - self.lower[self.free]
        gap_u = self.upper[self.free] - s[self.free]
        if not np.isfinite(base) or np.any(gap_l <= 0) or np.any(gap_u <= 0):
            return -math.inf
        return base + tau * float(np.sum(np.log(gap_l)) + np.sum(np.log(gap_u)))

    def newton_step(self, s: FloatArray, tau: float) -> tuple[FloatArray, float]:
        """Ascent direction and squared Newton decrement of the barrier objective."""
        d = np.diff(np.concatenate(([0.0], s, [1.0])))
        inv_d2 = 1.0 / d**2
        grad = 1.0 / d[:-1] - 1.0 / d[1:]
        diag = inv_d2[:-1] + inv_d2[1:]
        off = -inv_d2[1:-1].copy()

        free = self.free
        gap_l = s[free] - self.lower[free]
        gap_u = self.upper[free] - s[free]
        grad[free] += tau * (1.0 / gap_l - 1.0 / gap_u)
        diag[free] += tau * (1.0 / gap_l**2 + 1.0 / gap_u**2)
        return self._solve(grad, diag, off, self.pinned)

    @staticmethod
    def _solve(grad: FloatArray, diag: FloatArray, off: FloatArray, fixed: FloatArray) -> tuple[FloatArray, float]:
        grad = np.where(fixed, 0.0, grad)
        diag = np.where(fixed, 1.0, diag)
        if grad.size == 1:
            # LAPACK's banded solver rejects an empty off-diagonal.
            step = grad / diag
            return step, float(grad @ step)
        off = np.where(fixed[:-1] | fixed[1:], 0.0, off)
        banded = np.zeros((2, grad.size))
        banded[0, 1:] = off
        banded[1, :] = diag
        step = solveh_banded(banded, grad, check_finite=False)
        return step, float(grad @ step)

    def max_step(self, s: FloatArray, step: FloatArray) -> float:
        """Largest step keeping every log argument above BOUNDARY_FRACTION of its value."""
        d = np.diff(np.concatenate(([0.0], s, [1.0])))
        dd = np.diff(np.concatenate(([0.0], step, [0.0])))
        args = [d, s[self.free] - self.lower[self.free], self.upper[self.free] - s[self.free]]
        dirs = [dd, step[self.free], -step[self.free]]
        alpha = 1.0
        for arg, direction in zip(args, dirs):
            shrinking = direction < 0
            if np.any(shrinking):
                limit = (1.0 - BOUNDARY_FRACTION) * arg[shrinking] / -direction[shrinking]
                alpha = min(alpha, float(np.min(limit)))
        return alpha

    def polish(self, s: FloatArray) -> Optional[FloatArray]:
        """
        Snap near-active coordinates onto their bounds and re-solve the rest exactly.

        Returns None when the resulting point is infeasible or a multiplier has the
        wrong sign, in which case the barrier iterate is kept.
        """
        n = self.m + 1
        at_lower = self.free & (s - self.lower <= ACTIVE_TOL)
        at_upper = self.free & (self.upper - s <= ACTIVE_TOL) & ~at_lower
        fixed = self.pinned | at_lower | at_upper
        t = s.copy()
        t[self.pinned | at_lower] = self.lower[self.pinned | at_lower]
        t[at_upper] = self.upper[at_upper]
        if not np.isfinite(cumulative_objective(t)):
            return None

        for _ in range(POLISH_ITERATIONS):
            d = np.diff(np.concatenate(([0.0], t, [1.0])))
            inv_d2 = 1.0 / d**2
            grad = 1.0 / d[:-1] - 1.0 / d[1:]
            step, decrement = self._solve(grad, inv_d2[:-1] + inv_d2[1:], -inv_d2[1:-1].copy(), fixed)
            if decrement <= 1e-28:
                break
            dd = np.diff(np.concatenate(([0.0], step, [0.0])))
            shrinking = dd < 0
            alpha = 1.0
            if np.any(shrinking):
                alpha = min(1.0, float(np.min(0.99 * d[shrinking] / -dd[shrinking])))
            t = t + alpha * step

        free_now = ~fixed
        if np.any(t[free_now] < self.lower[free_now] - PROB_TOL) or np.any(t[free_now] > self.upper[free_now] + PROB_TOL):
            return None
        grad = cumulative_gradient(t) / n
        if np.any(grad[at_lower] > 1e-9) or np.any(grad[at_upper] < -1e-9):
            return None
        return np.clip(t, self.lower, np.maximum(self.upper, self.lower))

    def kkt_residual(self, s: FloatArray) -> float:
        """Infinity norm of the projected gradient of the statistic."""
        if self.m == 0:
            return 0.0
        n = self.m + 1
        grad = cumulative_gradient(s) / n
        projected = np.clip(s + grad, self.lower, np.maximum(self.upper, self.lower))
        return float(np.max(np.abs(s - projected)))


def _result_from_cumulative(
    s: FloatArray, problem: _BarrierProblem, iterations: int, sample: SortedSample
) -> ElrdfResult:
    w = np.maximum(np.diff(np.concatenate(([0.0], s, [1.0]))), 0.0)
    weights = WeightVector(w, 1.0)
    return ElrdfResult(
        weights=weights,
        statistic=elrdf_statistic(weights),
        kkt_residual=problem.kkt_residual(s),
        iterations=iterations,
        sample=sample,
    )


def solve_elrdf(
    sample: SortedSample, band: CdfBand, tol: float = DEFAULT_TOL, max_iterations: int = MAX_ITERATIONS
) -> ElrdfResult:
    """
    Maximize the empirical likelihood over CDFs inside the band.

    Args:
        sample: Sorted observations
        band: Null hypothesis band
        tol: Target duality gap and Newton decrement
        max_iterations: Cap on the total number of Newton steps

    Returns:
        ElrdfResult with the maximizing weights and the statistic

    Raises:
        InfeasibleBandError: If no CDF in the band is compatible with the sample
        MaxIterationsExceededError: If the barrier path does not converge in time
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    bounds = tighten_bounds(sample, band)
    problem = _BarrierProblem(bounds)
    n = sample.n

    if bounds.feasibility is Feasibility.INFEASIBLE:
        worst = int(np.argmax(bounds.lower - bounds.upper))
        raise InfeasibleBandError(INFEASIBLE_BAND_ERROR.format(f"L_{worst + 1} > U_{worst + 1}"))

    if bounds.feasibility is Feasibility.BOUNDARY_ONLY:
        logger.debug("Band forces a zero weight; statistic is +inf")
        w = np.maximum(np.diff(np.concatenate(([0.0], bounds.lower, [1.0]))), 0.0)
        # No interior optimum to certify; the statistic is +inf by construction.
        return ElrdfResult(WeightVector(w, 1.0), math.inf, 0.0, 0, sample)

    if bounds.uniform_feasible():
        return ElrdfResult(WeightVector.uniform(n), 0.0, 0.0, 0, sample)

    s = problem.initial_point()
    iterations = 0
    tau = INITIAL_TAU
    stage_tol = min(STAGE_TOL, tol)
    if np.any(problem.free):
        while True:
            while True:
                step, decrement = problem.newton_step(s, tau)
                if decrement / 2.0 <= stage_tol:
                    break
                if iterations >= max_iterations:
                    best = _result_from_cumulative(s, problem, iterations, sample)
                    raise MaxIterationsExceededError(MAX_ITERATIONS_ERROR.format(max_iterations), best=best)
                alpha = problem.max_step(s, step)
                current = problem.value(s, tau)
                while alpha > 1e-16:
                    if problem.value(s + alpha * step, tau) >= current + ARMIJO_SLOPE * alpha * decrement:
                        break
                    alpha *= BACKTRACK_FACTOR
                s = s + alpha * step
                iterations += 1
            logger.debug(f"Barrier stage tau={tau:.1e} done after {iterations} Newton steps")
            if 2 * (n - 1) * tau < tol:
                break
            tau /= TAU_REDUCTION

    polished = problem.polish(s)
    if polished is not None:
        s = polished
    result = _result_from_cumulative(s, problem, iterations, sample)
    logger.debug(f"ELRDF solved: n={n} statistic={result.statistic:.6g} kkt={result.kkt_residual:.2e}")
    return result

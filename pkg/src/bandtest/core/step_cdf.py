"""
Right-continuous piecewise-constant CDFs.

A StepCdf takes the value `levels[j]` on `[knots[j], knots[j+1])` and 0 before
`knots[0]`. ECDFs and band edges are both represented this way, so suprema and
infima over the real line reduce to scans over finitely many knots.
"""

from dataclasses import dataclass
from typing import Union, overload

import numpy as np

from bandtest.core.arrays import PROB_TOL, FloatArray, as_float_array, frozen
from bandtest.core.errors import InvalidStepCdfError
from bandtest.core.sample import SortedSample

Scalar = Union[float, int, np.floating]


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous step CDF given by knots and levels."""

    knots: FloatArray
    levels: FloatArray

    def __post_init__(self) -> None:
        knots = as_float_array(self.knots)
        levels = as_float_array(self.levels)
        if knots.shape != levels.shape:
            raise InvalidStepCdfError("knots and levels must have the same length")
        if not np.all(np.diff(knots) > 0) or np.any(np.isnan(knots)):
            raise InvalidStepCdfError("knots must be strictly increasing")
        if np.any(levels < -PROB_TOL) or np.any(levels > 1 + PROB_TOL):
            raise InvalidStepCdfError("levels must lie in [0, 1]")
        if np.any(np.diff(levels) < -PROB_TOL):
            raise InvalidStepCdfError("levels must be nondecreasing")
        # Absorb rounding noise so downstream code sees exact invariants.
        levels = np.maximum.accumulate(np.clip(levels, 0.0, 1.0))
        object.__setattr__(self, "knots", frozen(knots))
        object.__setattr__(self, "levels", frozen(levels))

    @classmethod
    def constant(cls, level: float) -> "StepCdf":
        """
        Build a flat function equal to `level` everywhere.

        A zero function has no knots; a positive level is carried by a knot at -inf.
        """
        if level == 0:
            return cls(np.empty(0), np.empty(0))
        return cls(np.array([-np.inf]), np.array([float(level)]))

    @property
    def size(self) -> int:
        return int(self.knots.size)

    @overload
    def eval_right(self, x: Scalar) -> float: ...

    @overload
    def eval_right(self, x: FloatArray) -> FloatArray: ...

    def eval_right(self, x: Union[Scalar, FloatArray]) -> Union[float, FloatArray]:
        """Value at x (right-continuous)."""
        return self._lookup(x, "right")

    @overload
    def eval_left(self, x: Scalar) -> float: ...

    @overload
    def eval_left(self, x: FloatArray) -> FloatArray: ...

    def eval_left(self, x: Union[Scalar, FloatArray]) -> Union[float, FloatArray]:
        """Limit from below at x."""
        return self._lookup(x, "left")

    def _lookup(self, x: Union[Scalar, FloatArray], side: str) -> Union[float, FloatArray]:
        padded = np.concatenate(([0.0], self.levels))
        idx = np.searchsorted(self.knots, x, side=side)  # type: ignore[call-overload]
        if np.ndim(idx) == 0:
            return float(padded[int(idx)])
        return padded[idx]


def ecdf(sample: SortedSample) -> StepCdf:
    """
    Empirical CDF of a sample: a jump of 1/n at every observation.

    Args:
        sample: The observations

    Returns:
        StepCdf with knots at the observations and levels (1/n, 2/n, ..., 1)
    """
    n = sample.n
    return StepCdf(sample.values.copy(), np.arange(1, n + 1, dtype=np.float64) / n)


def eval_right(cdf: StepCdf, x: Scalar) -> float:
    return cdf.eval_right(x)


def eval_left(cdf: StepCdf, x: Scalar) -> float:
    return cdf.eval_left(x)


def merged_knots(*cdfs: StepCdf) -> FloatArray:
    """
    Sorted union of the knot sets of several step CDFs.

    Piecewise-constant functions built on these knots can be compared exactly
    by looking at right values and left limits at each merged knot.
    """
    if not cdfs:
        return np.empty(0)
    return np.unique(np.concatenate([cdf.knots for cdf in cdfs]))

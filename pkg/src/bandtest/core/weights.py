"""Probability weights on sample points."""

from dataclasses import dataclass

import numpy as np

from bandtest.core.arrays import FloatArray, as_float_array, frozen
from bandtest.core.errors import InvalidWeightsError

SUM_TOL = 1e-10


@dataclass(frozen=True)
class WeightVector:
    """
    Nonnegative weights w_1..w_n with a prescribed total.

    The total is 1 for a rich band constraint and F(X_n) for a degenerate one.
    """

    w: FloatArray
    sum_target: float = 1.0

    def __post_init__(self) -> None:
        w = as_float_array(self.w)
        if np.any(w < 0):
            raise InvalidWeightsError("Weights must be nonnegative")
        if not 0.0 <= self.sum_target <= 1.0:
            raise InvalidWeightsError(f"Weight sum target {self.sum_target} is outside [0, 1]")
        if abs(float(np.sum(w)) - self.sum_target) > SUM_TOL:
            raise InvalidWeightsError(f"Weights sum to {np.sum(w)!r}, expected {self.sum_target!r}")
        object.__setattr__(self, "w", frozen(w))

    @property
    def n(self) -> int:
        return int(self.w.size)

    @property
    def cumulative(self) -> FloatArray:
        """Prefix sums s_i = w_1 + ... + w_i (the product A w)."""
        return np.cumsum(self.w)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.full(n, 1.0 / n), 1.0)

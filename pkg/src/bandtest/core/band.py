"""CDF uncertainty bands."""

from dataclasses import dataclass

import numpy as np

from bandtest.core.arrays import PROB_TOL, FloatArray
from bandtest.core.errors import InvalidBandError
from bandtest.core.step_cdf import StepCdf, merged_knots


@dataclass(frozen=True)
class CdfBand:
    """
    Pair of step CDFs bounding the null hypothesis: lower(x) <= F(x) <= upper(x).

    Both edges are piecewise constant, so pointwise validity everywhere is
    equivalent to validity at the merged knots.
    """

    lower: StepCdf
    upper: StepCdf

    def __post_init__(self) -> None:
        knots = self.knots()
        gap = self.lower.eval_right(knots) - self.upper.eval_right(knots)
        if knots.size and np.max(gap) > PROB_TOL:
            worst = int(np.argmax(gap))
            raise InvalidBandError(f"Band lower edge exceeds upper edge at x={knots[worst]!r}")

    @classmethod
    def vacuous(cls) -> "CdfBand":
        """Band admitting every CDF: lower = 0, upper = 1."""
        return cls(StepCdf.constant(0.0), StepCdf.constant(1.0))

    @classmethod
    def degenerate(cls, cdf: StepCdf) -> "CdfBand":
        """Band collapsed onto a single CDF."""
        return cls(cdf, cdf)

    def knots(self) -> FloatArray:
        return merged_knots(self.lower, self.upper)

    def contains(self, cdf: StepCdf, tol: float = PROB_TOL) -> bool:
        """Check whether a step CDF lies inside the band everywhere."""
        knots = merged_knots(self.lower, self.upper, cdf)
        values = cdf.eval_right(knots)
        return bool(
            np.all(self.lower.eval_right(knots) <= values + tol) and np.all(values <= self.upper.eval_right(knots) + tol)
        )

"""Binary decisions shared by every detector."""

import math
from enum import Enum


class Hypothesis(str, Enum):
    """Null (noise only) or alternative (signal present)."""

    H0 = "H0"
    H1 = "H1"

    @property
    def index(self) -> int:
        return 0 if self is Hypothesis.H0 else 1


def decide(statistic: float, threshold: float) -> Hypothesis:
    """
    Declare H1 when the statistic strictly exceeds the threshold.

    Equality goes to H0 for every detector in the package. A +inf statistic
    exceeds every finite threshold.
    """
    if math.isnan(statistic):
        raise ValueError("Statistic is NaN")
    return Hypothesis.H1 if statistic > threshold else Hypothesis.H0

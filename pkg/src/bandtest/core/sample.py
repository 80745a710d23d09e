"""Sorted observation vectors and tie handling."""

from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from bandtest.core.arrays import FloatArray, as_float_array, frozen
from bandtest.core.errors import (
    DUPLICATE_SAMPLE_ERROR,
    EMPTY_INPUT_ERROR,
    NON_FINITE_ERROR,
    DuplicateSampleError,
    EmptyInputError,
)
from bandtest.utils.logger import logger


class TiePolicy(str, Enum):
    """How exact duplicates in raw data are resolved."""

    ERROR = "error"
    JITTER = "jitter"


@dataclass(frozen=True)
class SortedSample:
    """
    Strictly increasing observation vector.

    Every statistic in the package is evaluated on the grid given by these values.
    """

    values: FloatArray

    def __post_init__(self) -> None:
        values = as_float_array(self.values)
        if values.size == 0:
            raise EmptyInputError(EMPTY_INPUT_ERROR)
        if not np.all(np.isfinite(values)):
            raise ValueError(NON_FINITE_ERROR)
        if np.any(np.diff(values) <= 0):
            raise ValueError("SortedSample values must be strictly increasing")
        object.__setattr__(self, "values", frozen(values))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


def canonicalize_sample(raw: "npt.ArrayLike", tie_policy: TiePolicy = TiePolicy.ERROR) -> SortedSample:
    """
    Sort raw observations into a SortedSample.

    Args:
        raw: Observations in any order
        tie_policy: `error` rejects exact duplicates, `jitter` nudges each tied value
            one ulp above its predecessor (stable order is kept)

    Returns:
        The canonical sample

    Raises:
        EmptyInputError: If `raw` is empty
        DuplicateSampleError: If ties are present under the `error` policy
    """
    values = as_float_array(raw)
    if values.size == 0:
        raise EmptyInputError(EMPTY_INPUT_ERROR)
    if not np.all(np.isfinite(values)):
        raise ValueError(NON_FINITE_ERROR)

    values = np.sort(values, kind="stable")
    ties = np.flatnonzero(np.diff(values) <= 0)
    if ties.size == 0:
        return SortedSample(values)

    if TiePolicy(tie_policy) is TiePolicy.ERROR:
        raise DuplicateSampleError(DUPLICATE_SAMPLE_ERROR.format(values[ties[0]]))

    logger.debug(f"Jittering {ties.size} tied observations")
    for i in range(ties[0] + 1, values.size):
        if values[i] <= values[i - 1]:
            values[i] = np.nextafter(values[i - 1], np.inf)
    return SortedSample(values)

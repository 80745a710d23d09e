"""Array aliases and small numeric helpers."""

from typing import Union

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
ArrayLike = Union[FloatArray, list[float], tuple[float, ...]]

# Tolerance for comparisons against probability invariants.
PROB_TOL = 1e-12


def as_float_array(values: "npt.ArrayLike") -> FloatArray:
    """
    Convert input to a contiguous 1-D float64 array.

    Args:
        values: Anything numpy can turn into a vector

    Returns:
        A fresh 1-D float64 array that never aliases the input
    """
    return np.atleast_1d(np.array(values, dtype=np.float64)).ravel()


def frozen(values: FloatArray) -> FloatArray:
    """Mark an array read-only and return it."""
    values.setflags(write=False)
    return values

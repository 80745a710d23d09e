"""
Empirical uncertainty bands built from grouped noise records.

A long noise record is cut into consecutive groups of equal size. Each group
yields an ECDF, and the band edges are the pointwise minimum and maximum of
these ECDFs on the union of all group knots.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from bandtest.core.arrays import FloatArray, as_float_array, frozen
from bandtest.core.band import CdfBand
from bandtest.core.errors import (
    EMPTY_INPUT_ERROR,
    NON_FINITE_ERROR,
    TOO_FEW_SAMPLES_ERROR,
    EmptyInputError,
    TooFewSamplesError,
)
from bandtest.core.step_cdf import StepCdf
from bandtest.utils.logger import logger

DEFAULT_GROUP_SIZE = 100


def build_band(raw: "npt.ArrayLike", group_size: int = DEFAULT_GROUP_SIZE) -> CdfBand:
    """
    Envelope of the ECDFs of consecutive groups.

    Trailing samples that do not fill a whole group are discarded. Exact ties
    inside a group are legitimate here: the group ECDF simply jumps by a
    multiple of 1/group_size.

    Args:
        raw: Noise record in acquisition order
        group_size: Number of samples per group

    Returns:
        CdfBand whose lower edge is the pointwise minimum and upper edge the
        pointwise maximum of the group ECDFs

    Raises:
        TooFewSamplesError: If fewer than two full groups are available
    """
    if group_size < 1:
        raise ValueError("group_size must be at least 1")
    values = as_float_array(raw)
    if not np.all(np.isfinite(values)):
        raise ValueError(NON_FINITE_ERROR)
    if values.size < 2 * group_size:
        raise TooFewSamplesError(TOO_FEW_SAMPLES_ERROR.format(2 * group_size, group_size, values.size))

    n_groups = values.size // group_size
    remainder = values.size - n_groups * group_size
    if remainder:
        logger.warning(f"Discarding {remainder} trailing samples that do not fill a group of {group_size}")

    groups = np.sort(values[: n_groups * group_size].reshape(n_groups, group_size), axis=1)
    knots = np.unique(groups)

    lower = np.ones(knots.size)
    upper = np.zeros(knots.size)
    for group in groups:
        levels = np.searchsorted(group, knots, side="right") / group_size
        np.minimum(lower, levels, out=lower)
        np.maximum(upper, levels, out=upper)

    logger.info(f"Built band from {n_groups} groups of {group_size} samples on {knots.size} knots")
    return CdfBand(StepCdf(knots, lower), StepCdf(knots.copy(), upper))


def record_ecdf(raw: "npt.ArrayLike") -> StepCdf:
    """ECDF of a raw record; tied values produce a single larger jump."""
    values = as_float_array(raw)
    if values.size == 0:
        raise EmptyInputError(EMPTY_INPUT_ERROR)
    if not np.all(np.isfinite(values)):
        raise ValueError(NON_FINITE_ERROR)
    knots, counts = np.unique(values, return_counts=True)
    return StepCdf(knots, np.cumsum(counts) / values.size)


def group_ecdfs(raw: "npt.ArrayLike", group_size: int = DEFAULT_GROUP_SIZE) -> list[StepCdf]:
    """ECDFs of the consecutive full groups of a record."""
    values = as_float_array(raw)
    n_groups = values.size // group_size
    return [record_ecdf(group) for group in values[: n_groups * group_size].reshape(n_groups, group_size)]


@dataclass(frozen=True)
class BandWidthProfile:
    """Band width upper - lower at each merged knot (right values)."""

    knots: FloatArray
    widths: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "knots", frozen(as_float_array(self.knots)))
        object.__setattr__(self, "widths", frozen(as_float_array(self.widths)))

    @property
    def max_width(self) -> float:
        return float(np.max(self.widths)) if self.widths.size else 0.0


def band_width_profile(band: CdfBand) -> BandWidthProfile:
    knots = band.knots()
    widths = np.clip(band.upper.eval_right(knots) - band.lower.eval_right(knots), 0.0, 1.0)
    return BandWidthProfile(knots, widths)

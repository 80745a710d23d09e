"""Step functions, samples, bands and weights shared by every statistic."""

from bandtest.core.band import CdfBand
from bandtest.core.decision import Hypothesis, decide
from bandtest.core.sample import SortedSample, TiePolicy, canonicalize_sample
from bandtest.core.step_cdf import StepCdf, ecdf, eval_left, eval_right, merged_knots
from bandtest.core.weights import WeightVector

__all__ = [
    "CdfBand",
    "Hypothesis",
    "SortedSample",
    "StepCdf",
    "TiePolicy",
    "WeightVector",
    "canonicalize_sample",
    "decide",
    "ecdf",
    "eval_left",
    "eval_right",
    "merged_knots",
]

"""Goodness-of-fit statistics under uncertain null distributions."""

from bandtest.statistics.baselines import (
    MomentConstraint,
    cvm_statistic,
    elrm_statistic,
    ks_decide,
    ks_normality_statistic,
    ks_statistic,
    robust_cvm_fit,
    robust_cvm_statistic,
    robust_ks_statistic,
)
from bandtest.statistics.degenerate import GroupingPlan, degenerate_weights, grouped_statistic
from bandtest.statistics.elrdf import ElrdfResult, Feasibility, elrdf_decide, elrdf_statistic, solve_elrdf
from bandtest.statistics.registry import TestContext, TestRegistry

__all__ = [
    "ElrdfResult",
    "Feasibility",
    "GroupingPlan",
    "MomentConstraint",
    "TestContext",
    "TestRegistry",
    "cvm_statistic",
    "degenerate_weights",
    "elrdf_decide",
    "elrdf_statistic",
    "elrm_statistic",
    "grouped_statistic",
    "ks_decide",
    "ks_normality_statistic",
    "ks_statistic",
    "robust_cvm_fit",
    "robust_cvm_statistic",
    "robust_ks_statistic",
    "solve_elrdf",
]

"""
Registry of test statistics usable in Monte-Carlo sweeps.

Each entry maps a test name to a factory that closes over a `TestContext` and
returns a `StatisticFn`. A statistic function receives the raw observations of one
trial and that trial's generator, and returns a real statistic where larger values
favour H1.
"""

import math
from dataclasses import dataclass
from typing import Callable, ClassVar, Optional

import numpy as np

from bandtest.core.arrays import FloatArray
from bandtest.core.band import CdfBand
from bandtest.core.errors import InfeasibleBandError, InfeasibleMomentError, MaxIterationsExceededError
from bandtest.core.sample import TiePolicy, canonicalize_sample
from bandtest.statistics.baselines import (
    MomentConstraint,
    cvm_statistic,
    elrm_statistic,
    ks_normality_statistic,
    ks_statistic,
    robust_cvm_statistic,
    robust_ks_statistic,
)
from bandtest.statistics.degenerate import GroupingPlan, NullCdf, grouped_statistic
from bandtest.statistics.elrdf import DEFAULT_TOL, solve_elrdf
from bandtest.utils.logger import logger

StatisticFn = Callable[[FloatArray, np.random.Generator], float]

MISSING_CONTEXT_ERROR = "Test '{}' needs a {} in its context"
UNKNOWN_TEST_ERROR = "Unknown test '{}'. Available tests: {}"


@dataclass(frozen=True)
class TestContext:
    """Everything a registered test may need besides the observations."""

    __test__ = False

    band: Optional[CdfBand] = None
    null: Optional[NullCdf] = None
    moment: Optional[MomentConstraint] = None
    tol: float = DEFAULT_TOL
    tie_policy: TiePolicy = TiePolicy.ERROR
    groups: int = 1
    group_size: Optional[int] = None
    two_sided: bool = False

    def require_band(self, test: str) -> CdfBand:
        if self.band is None:
            raise ValueError(MISSING_CONTEXT_ERROR.format(test, "band"))
        return self.band

    def require_null(self, test: str) -> NullCdf:
        if self.null is None:
            raise ValueError(MISSING_CONTEXT_ERROR.format(test, "null CDF"))
        return self.null


TestFactory = Callable[[TestContext], StatisticFn]


@dataclass
class TestRegistration:
    """Registration information for a test."""

    __test__ = False

    factory: TestFactory
    description: str


class TestRegistry:
    """Registry for the statistics available to ROC experiments."""

    __test__ = False

    _tests: ClassVar[dict[str, TestRegistration]] = {}

    @classmethod
    def register(cls, name: str, description: str = "") -> Callable[[TestFactory], TestFactory]:
        """
        Register a statistic factory under a test name.

        Args:
            name: Name used in configs and on the command line
            description: One-line summary shown in listings

        Returns:
            Decorator function
        """

        def decorator(factory: TestFactory) -> TestFactory:
            cls._tests[name] = TestRegistration(factory=factory, description=description)
            return factory

        return decorator

    @classmethod
    def get(cls, name: str) -> Optional[TestRegistration]:
        return cls._tests.get(name)

    @classmethod
    def names(cls) -> list[str]:
        return sorted(cls._tests)

    @classmethod
    def build(cls, name: str, context: TestContext) -> StatisticFn:
        """
        Instantiate the statistic function for a test.

        Raises:
            ValueError: If the name is not registered or the context lacks an input
        """
        registration = cls.get(name)
        if registration is None:
            raise ValueError(UNKNOWN_TEST_ERROR.format(name, ", ".join(cls.names())))
        return registration.factory(context)


@TestRegistry.register("elrdf", "Empirical likelihood ratio with CDF band constraints")
def _elrdf(context: TestContext) -> StatisticFn:
    band = context.require_band("elrdf")

    def statistic(raw: FloatArray, rng: np.random.Generator) -> float:
        sample = canonicalize_sample(raw, context.tie_policy)
        try:
            return solve_elrdf(sample, band, tol=context.tol).statistic
        except InfeasibleBandError:
            return math.inf
        except MaxIterationsExceededError as e:
            logger.warning(f"ELRDF hit its iteration cap; using the last iterate ({e})")
            return float(e.best.statistic)

    return statistic


@TestRegistry.register("rks", "Robust Kolmogorov-Smirnov distance to the band")
def _rks(context: TestContext) -> StatisticFn:
    band = context.require_band("rks")
    return lambda raw, rng: robust_ks_statistic(canonicalize_sample(raw, context.tie_policy), band)


@TestRegistry.register("rcvm", "Robust Cramer-von Mises statistic")
def _rcvm(context: TestContext) -> StatisticFn:
    band = context.require_band("rcvm")

    def statistic(raw: FloatArray, rng: np.random.Generator) -> float:
        try:
            return robust_cvm_statistic(canonicalize_sample(raw, context.tie_policy), band)
        except InfeasibleBandError:
            return math.inf

    return statistic


@TestRegistry.register("elrm", "Empirical likelihood ratio with a moment interval")
def _elrm(context: TestContext) -> StatisticFn:
    if context.moment is None:
        raise ValueError(MISSING_CONTEXT_ERROR.format("elrm", "moment constraint"))
    moment = context.moment

    def statistic(raw: FloatArray, rng: np.random.Generator) -> float:
        try:
            return elrm_statistic(canonicalize_sample(raw, context.tie_policy), moment)
        except InfeasibleMomentError:
            return math.inf

    return statistic


@TestRegistry.register("degen", "ELRDF under a fully known null, averaged over groups")
def _degen(context: TestContext) -> StatisticFn:
    null = context.require_null("degen")

    def statistic(raw: FloatArray, rng: np.random.Generator) -> float:
        m = context.group_size or raw.size // context.groups
        if context.groups == 1:
            plan = GroupingPlan.identity(1, m)
        else:
            plan = GroupingPlan.random(context.groups, m, rng)
        return grouped_statistic(raw[: plan.n], null, plan, context.tie_policy, context.two_sided)

    return statistic


@TestRegistry.register("ks", "Classical Kolmogorov-Smirnov distance to a known null")
def _ks(context: TestContext) -> StatisticFn:
    null = context.require_null("ks")
    return lambda raw, rng: ks_statistic(canonicalize_sample(raw, context.tie_policy), null)


@TestRegistry.register("cvm", "Classical Cramer-von Mises statistic against a known null")
def _cvm(context: TestContext) -> StatisticFn:
    null = context.require_null("cvm")
    return lambda raw, rng: cvm_statistic(canonicalize_sample(raw, context.tie_policy), null)


@TestRegistry.register("normality", "KS distance to the fitted Gaussian")
def _normality(context: TestContext) -> StatisticFn:
    return lambda raw, rng: ks_normality_statistic(raw)

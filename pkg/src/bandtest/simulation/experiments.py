"""
End-to-end Monte-Carlo experiments driven by an ExperimentConfig.

The reference noise record (stream REFERENCE_STREAM) plays the role of the
measured noise data: the band is built from it and the `reference` null is its ECDF.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from bandtest.band.builder import build_band, record_ecdf
from bandtest.band.io import load_band
from bandtest.config import REFERENCE_NULL, ExperimentConfig, parse_null_spec
from bandtest.core.arrays import FloatArray
from bandtest.core.band import CdfBand
from bandtest.core.decision import Hypothesis
from bandtest.simulation.noise import GaussianNoise, NoiseModel, gen_noise
from bandtest.simulation.rng import REFERENCE_STREAM, stream_id, trial_stream
from bandtest.simulation.roc import RocCurve, parallel_map, sweep_roc
from bandtest.statistics.baselines import MOMENT_FUNCTIONS, MomentConstraint, ks_normality_statistic
from bandtest.statistics.degenerate import NullCdf, step_null
from bandtest.statistics.registry import TestContext, TestRegistry
from bandtest.utils.logger import logger

BAND_TESTS = ("elrdf", "rks", "rcvm")
NULL_TESTS = ("degen", "ks", "cvm")


@dataclass(frozen=True)
class RocExperimentResult:
    test: str
    seed: int
    trials: int
    curve: RocCurve


def reference_record(config: ExperimentConfig) -> FloatArray:
    return gen_noise(config.noise.build(config.seed), config.band.samples, REFERENCE_STREAM)


def experiment_band(config: ExperimentConfig, reference: Optional[FloatArray] = None) -> CdfBand:
    """Band from `band.file`, or built from the reference record."""
    if config.band.file:
        return load_band(config.band.file)
    record = reference if reference is not None else reference_record(config)
    return build_band(record, config.band.group_size)


def experiment_null(config: ExperimentConfig, reference: Optional[FloatArray] = None) -> NullCdf:
    if config.degen.null != REFERENCE_NULL:
        return parse_null_spec(config.degen.null)
    record = reference if reference is not None else reference_record(config)
    return step_null(record_ecdf(record))


def experiment_context(config: ExperimentConfig) -> TestContext:
    """Inputs the configured test needs, and only those."""
    reference = None
    if (config.test in BAND_TESTS and not config.band.file) or (
        config.test in NULL_TESTS and config.degen.null == REFERENCE_NULL
    ):
        reference = reference_record(config)

    return TestContext(
        band=experiment_band(config, reference) if config.test in BAND_TESTS else None,
        null=experiment_null(config, reference) if config.test in NULL_TESTS else None,
        moment=MomentConstraint(MOMENT_FUNCTIONS[config.elrm.moment], config.elrm.lower, config.elrm.upper),
        tol=config.tol,
        tie_policy=config.tie_policy,
        groups=config.degen.groups,
        group_size=config.degen_group_size,
        two_sided=config.degen.two_sided,
    )


def run_roc_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> RocExperimentResult:
    """
    Estimate the ROC curve of the configured test.

    Args:
        config: Validated experiment configuration
        threads: Worker threads, BANDTEST_THREADS if None

    Returns:
        RocExperimentResult with the oriented curve
    """
    logger.info(f"Running ROC experiment: test={config.test} n={config.n} trials={config.trials} seed={config.seed}")
    statistic_fn = TestRegistry.build(config.test, experiment_context(config))
    noise = config.noise.build(config.seed)
    channel = config.channel.build()
    n = config.n

    curve = sweep_roc(
        statistic_fn,
        lambda rng: channel.observe(rng, noise, n, Hypothesis.H0),
        lambda rng: channel.observe(rng, noise, n, Hypothesis.H1),
        config.trials,
        seed=config.seed,
        threads=threads,
        threshold_count=config.threshold_count,
    )
    logger.info(f"AUC({config.test}) = {curve.auc:.4f}{' (flipped)' if curve.flipped else ''}")
    return RocExperimentResult(test=config.test, seed=config.seed, trials=config.trials, curve=curve)


@dataclass(frozen=True)
class NormalityStudyRow:
    """Sorted normality statistics under stationary and nonstationary noise."""

    size: int
    stationary: FloatArray
    nonstationary: FloatArray

    @property
    def distance(self) -> float:
        """Two-sample KS distance between the two statistic samples."""
        return float(stats.ks_2samp(self.stationary, self.nonstationary).statistic)


def normality_study(
    sizes: list[int],
    replications: int,
    noise: NoiseModel,
    seed: int = 0,
    threads: Optional[int] = None,
) -> list[NormalityStudyRow]:
    """
    Distribution of the KS normality statistic for stationary and nonstationary noise.

    Stationary records are standard Gaussian; nonstationary records come from `noise`.
    Replication r of either kind uses its own stream, so sizes are comparable.

    Args:
        sizes: Record lengths, each at least 2
        replications: Records per size and kind
        noise: Nonstationary noise model
        seed: Experiment seed
        threads: Worker threads, BANDTEST_THREADS if None
    """
    if replications < 1:
        raise ValueError("replications must be at least 1")
    if any(size < 2 for size in sizes):
        raise ValueError("sizes must be at least 2")
    stationary = GaussianNoise(0.0, 1.0, seed)

    rows = []
    for size in sizes:

        def replicate(r: int, size: int = size) -> tuple[float, float]:
            a = stationary.draw(trial_stream(seed, stream_id(Hypothesis.H0, r)), size)
            b = noise.draw(trial_stream(seed, stream_id(Hypothesis.H1, r)), size)
            return ks_normality_statistic(a), ks_normality_statistic(b)

        values = np.asarray(parallel_map(replicate, replications, threads), dtype=np.float64)
        rows.append(NormalityStudyRow(size, np.sort(values[:, 0]), np.sort(values[:, 1])))
        logger.info(f"Normality study: size {size} done")
    return rows

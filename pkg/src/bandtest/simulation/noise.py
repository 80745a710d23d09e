"""Additive noise models."""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from bandtest.core.arrays import FloatArray
from bandtest.simulation.rng import trial_stream

MIXTURE_WEIGHT_TOL = 1e-9


class NoiseModel(ABC):
    """Noise law with the seed of the experiment it belongs to."""

    seed: int

    @abstractmethod
    def draw(self, rng: np.random.Generator, n: int) -> FloatArray:
        """Draw n noise samples from the given generator."""


@dataclass(frozen=True)
class GaussianNoise(NoiseModel):
    mean: float = 0.0
    sd: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sd <= 0:
            raise ValueError("Noise sd must be positive")

    def draw(self, rng: np.random.Generator, n: int) -> FloatArray:
        return rng.normal(self.mean, self.sd, size=n)


@dataclass(frozen=True)
class MixtureComponent:
    weight: float
    mean: float
    sd: float


@dataclass(frozen=True)
class MixtureNoise(NoiseModel):
    """Gaussian mixture; each sample picks its component independently."""

    components: tuple[MixtureComponent, ...] = field(default_factory=tuple)
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("Mixture needs at least one component")
        weights = [c.weight for c in self.components]
        if any(w <= 0 for w in weights):
            raise ValueError("Mixture weights must be positive")
        if abs(math.fsum(weights) - 1.0) > MIXTURE_WEIGHT_TOL:
            raise ValueError("Mixture weights must sum to 1")
        if any(c.sd <= 0 for c in self.components):
            raise ValueError("Mixture sds must be positive")

    def draw(self, rng: np.random.Generator, n: int) -> FloatArray:
        weights = np.array([c.weight for c in self.components])
        means = np.array([c.mean for c in self.components])
        sds = np.array([c.sd for c in self.components])
        picks = rng.choice(len(self.components), size=n, p=weights / weights.sum())
        return rng.normal(means[picks], sds[picks])


@dataclass(frozen=True)
class BlockNonstationaryNoise(NoiseModel):
    """
    Gaussian noise whose sd is redrawn for every block of consecutive samples.

    Samples inside a block share one law, while the sd changes over time
    uniformly within [sd_low, sd_high]. A record always starts a new block.
    """

    block_len: int = 100
    sd_low: float = 0.5
    sd_high: float = 2.0
    mean: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.block_len < 1:
            raise ValueError("block_len must be at least 1")
        if not 0 < self.sd_low <= self.sd_high:
            raise ValueError("sd interval must satisfy 0 < sd_low <= sd_high")

    def draw(self, rng: np.random.Generator, n: int) -> FloatArray:
        n_blocks = -(-n // self.block_len)
        sds = rng.uniform(self.sd_low, self.sd_high, size=n_blocks)
        return rng.normal(self.mean, np.repeat(sds, self.block_len)[:n])


def gen_noise(model: NoiseModel, n: int, stream: int) -> FloatArray:
    """Noise record determined by the model's seed and the stream id."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return model.draw(trial_stream(model.seed, stream), n)

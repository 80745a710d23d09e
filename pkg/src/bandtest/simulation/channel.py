"""Fading channels Y_i = h_i X + v_i with the binary signal X fixed to 1."""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from bandtest.core.arrays import FloatArray
from bandtest.core.decision import Hypothesis
from bandtest.simulation.noise import NoiseModel
from bandtest.simulation.rng import trial_stream

SIGNAL_AMPLITUDE = 1.0


class ChannelModel(ABC):
    @abstractmethod
    def gains(self, rng: np.random.Generator, n: int) -> FloatArray:
        """Channel gains h_1..h_n."""

    def observe(self, rng: np.random.Generator, noise: NoiseModel, n: int, hypothesis: Hypothesis) -> FloatArray:
        """
        One observation record.

        Noise is drawn first so that H0 and H1 records of the same stream share it.
        """
        v = noise.draw(rng, n)
        if Hypothesis(hypothesis) is Hypothesis.H0:
            return v
        return self.gains(rng, n) * SIGNAL_AMPLITUDE + v


@dataclass(frozen=True)
class SlowFading(ChannelModel):
    """Constant but unknown gain."""

    gain: float = 3.0

    def gains(self, rng: np.random.Generator, n: int) -> FloatArray:
        return np.full(n, float(self.gain))


@dataclass(frozen=True)
class FastFading(ChannelModel):
    """Independent gains, uniform on [low, high]."""

    low: float = -10.0
    high: float = 10.0

    def __post_init__(self) -> None:
        if not self.low < self.high:
            raise ValueError("Fast fading needs low < high")

    def gains(self, rng: np.random.Generator, n: int) -> FloatArray:
        return rng.uniform(self.low, self.high, size=n)


def gen_observation(
    channel: ChannelModel, noise: NoiseModel, n: int, hypothesis: Hypothesis, stream: int
) -> FloatArray:
    if n < 1:
        raise ValueError("n must be at least 1")
    return channel.observe(trial_stream(noise.seed, stream), noise, n, hypothesis)

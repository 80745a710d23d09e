"""Noise and channel models, counter-based streams and the ROC harness."""

from bandtest.simulation.channel import ChannelModel, FastFading, SlowFading, gen_observation
from bandtest.simulation.noise import BlockNonstationaryNoise, GaussianNoise, MixtureNoise, NoiseModel, gen_noise
from bandtest.simulation.rng import stream_id, trial_stream
from bandtest.simulation.roc import RocCurve, auto_thresholds, sweep_roc

__all__ = [
    "BlockNonstationaryNoise",
    "ChannelModel",
    "FastFading",
    "GaussianNoise",
    "MixtureNoise",
    "NoiseModel",
    "RocCurve",
    "SlowFading",
    "auto_thresholds",
    "gen_noise",
    "gen_observation",
    "stream_id",
    "sweep_roc",
    "trial_stream",
]

"""
Counter-based random streams.

Every trial owns a Philox generator keyed by the experiment seed whose counter
starts at a block derived from the trial's stream id. Streams never overlap and
a trial's draws do not depend on which thread runs it or in what order.
"""

import numpy as np

from bandtest.core.decision import Hypothesis

STREAM_STRIDE = 2**32
# Stream reserved for the reference noise record a band is built from.
REFERENCE_STREAM = 2 * STREAM_STRIDE
MAX_SEED = 2**64 - 1


def stream_id(hypothesis: Hypothesis, trial: int) -> int:
    """Stream of trial `trial` under `hypothesis`: h * 2**32 + t."""
    if not 0 <= trial < STREAM_STRIDE:
        raise ValueError(f"trial index must lie in [0, {STREAM_STRIDE})")
    return Hypothesis(hypothesis).index * STREAM_STRIDE + trial


def trial_stream(seed: int, stream: int) -> np.random.Generator:
    """
    Generator for one stream of one experiment.

    Args:
        seed: Experiment seed, a 64-bit unsigned integer
        stream: Stream id, see `stream_id`

    Returns:
        Fresh numpy Generator backed by Philox
    """
    if not 0 <= seed <= MAX_SEED:
        raise ValueError("seed must be a 64-bit unsigned integer")
    if not 0 <= stream <= MAX_SEED:
        raise ValueError("stream must be a 64-bit unsigned integer")
    bit_generator = np.random.Philox(key=seed, counter=np.array([0, 0, stream, 0], dtype=np.uint64))
    return np.random.Generator(bit_generator)

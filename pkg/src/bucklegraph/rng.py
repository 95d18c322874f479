"""Seed-stream construction.

All randomness flows through counter-based Philox generators keyed by
``SeedSequence`` entropy tuples, so every artifact is reproducible across
platforms.  Stream layout:

    (seed, STREAM_*, index, attempt)

- geometry:   one stream per structure attempt; ``attempt`` increments on
  connectivity / simulation resampling, ``seed`` stays the structure seed.
- training:   one stream per model seed (weight init + epoch shuffling).
- generic:    ad-hoc substreams for tests and utilities.

The draw order *within* a stream is part of each consumer's contract and is
documented where the draws happen (see ``geometry.generate``).
"""

import numpy as np

STREAM_GEOMETRY = 1
STREAM_TRAINING = 2
STREAM_SHUFFLE = 3

_U64 = 2**64


def substream(*entropy):
    """Return a fresh ``Generator`` for the given entropy tuple."""
    words = tuple(int(e) % _U64 for e in entropy)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=words)))


def structure_seed(master_seed, index):
    """Stable per-structure seed derived from the run's master seed."""
    rng = substream(master_seed, STREAM_GEOMETRY, index)
    return int(rng.integers(0, _U64, dtype=np.uint64))


def model_seed(master_seed, model_index):
    """Stable per-model training seed."""
    rng = substream(master_seed, STREAM_TRAINING, model_index)
    return int(rng.integers(0, _U64, dtype=np.uint64))

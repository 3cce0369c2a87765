"""Stable per-acquisition random streams.

Every random quantity is drawn from a stream keyed by (master seed, tag,
acquisition index, retry). Streams never depend on execution order, so a
corpus is identical whatever the worker count.
"""

import zlib

import numpy as np

SUSTAINED_LOAD = "sustained-load"
INTERMITTENT_LOAD = "intermittent-load"
TEMPERATURE = "temperature"
AMBIENT_SIGMA = "ambient-sigma"
AMBIENT_INPUT = "ambient-input"
MEASUREMENT_NOISE = "measurement-noise"
FAULT_PLAN = "fault-plan"
FAULT_APPLY = "fault-apply"
TARGET_SAMPLING = "target-sampling"


def acquisition_seed(master_seed: int, tag: str, index: int = 0, retry: int = 0) -> np.random.SeedSequence:
    """Seed sequence for one (tag, index, retry) stream."""
    return np.random.SeedSequence(master_seed, spawn_key=(zlib.crc32(tag.encode()), index, retry))


def rng_for(master_seed: int, tag: str, index: int = 0, retry: int = 0) -> np.random.Generator:
    return np.random.default_rng(acquisition_seed(master_seed, tag, index, retry))

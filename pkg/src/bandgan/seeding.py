"""Named random streams derived from a single master seed.

A stream is ``SeedSequence(master, spawn_key=(stream_id, *counters))``.
Stream ids are fixed integers so the derivation is stable across releases;
never renumber them.
"""

import numpy as np

STREAMS = {
    "scene": 0,
    "mask-train": 1,
    "mask-val": 2,
    "mask-test": 3,
    "init": 4,
    "shuffle": 5,
}


def stream(seed, name, *counters):
    """Return a fresh ``Generator`` for the named sub-stream of ``seed``."""
    if name not in STREAMS:
        raise KeyError(f"unknown random stream {name!r}")
    if seed is None:
        raise ValueError("a seed is mandatory; wall-clock seeding is not supported")
    key = (STREAMS[name],) + tuple(int(c) for c in counters)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def as_generator(seed):
    """Accept an int, SeedSequence or Generator and return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("a seed is mandatory; wall-clock seeding is not supported")
    return np.random.default_rng(seed)

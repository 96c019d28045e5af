"""Counter-based, splittable random streams.

Every stream is a Philox generator keyed by (root seed, stream path), so a
trial's draws do not depend on how many other trials ran before it or on
which thread ran it.
"""
import numpy as np


def make_rng(seed, *path):
    """Generator for the stream identified by ``seed`` and integer ``path``."""
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def as_rng(rng):
    """Accept a Generator, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return make_rng(0)
    return make_rng(int(rng))


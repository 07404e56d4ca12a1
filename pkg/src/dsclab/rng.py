"""Deterministic randomness.

Every random quantity in the package flows from one explicit 64-bit seed
through numpy's counter-based Philox generator. Distinct substreams are
opened by placing a stream index in the second Philox key word; streams
never overlap and can be drawn in any order (or in parallel) while
staying bit-reproducible. Instance generation drains stream 0 of its
seed sequentially; suite parallelism relies on per-recipe seeds, which
the config parser requires to be distinct.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def make_generator(seed, stream=0):
    """Return a Generator on substream `stream` of the given seed."""
    key = np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

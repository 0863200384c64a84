"""Reproducible, splittable random streams.

A stream is named by ``(seed, stream_id)``, two unsigned 64-bit integers.
Both are passed through the SplitMix64 finalizer and used as the 128-bit
key of a Philox counter-based generator. Streams with different ids are
therefore statistically independent, and a given pair always yields the
same sequence regardless of how work is spread over threads.
"""

import numpy as np

MASK64 = (1 << 64) - 1
DEFAULT_SEED = 0xC0FFEE


def splitmix64(x):
    """SplitMix64 output function applied to a single 64-bit word."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed, stream_id):
    """128-bit Philox key derived from ``(seed, stream_id)``."""
    seed = int(seed) & MASK64
    stream_id = int(stream_id) & MASK64
    hi = splitmix64(seed)
    lo = splitmix64(hi ^ splitmix64(stream_id ^ 0xD1B54A32D192ED03))
    return (hi << 64) | lo


def generator(seed, stream_id=0):
    """A fresh ``numpy.random.Generator`` for the stream ``(seed, stream_id)``."""
    return np.random.Generator(np.random.Philox(key=stream_key(seed, stream_id)))


def derive_seed(seed, tag):
    """A child seed for an independent sub-experiment labelled by integer ``tag``."""
    return splitmix64((int(seed) & MASK64) ^ splitmix64(int(tag) & MASK64 ^ 0x9FB21C651E98DF25))

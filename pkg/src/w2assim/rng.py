"""Deterministic, counter-based random streams.

Streams are keyed by ``(seed, stream_id)`` on top of numpy's Philox
counter-based generator.  Draws depend only on the key pair, so independent
trials can run in any order (or on any number of workers) and still
reproduce bit for bit.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Return a fresh Generator for the given (seed, stream id) pair."""
    key = np.array([seed & _MASK64, stream_id & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

"""Counter-based random streams keyed by ``(seed, replication)``.

Each replication draws from its own Philox stream, so results do not depend
on how replications are scheduled across workers.
"""
from __future__ import annotations

import numpy as np

__all__ = ["replication_rng"]

_SEED_BITS = 128


def replication_rng(seed: int, replication: int, stream: int = 0) -> np.random.Generator:
    """Generator for one replication.

    The seed is the Philox key; ``replication`` and ``stream`` occupy the two
    upper 64-bit words of the starting counter, which leaves ``2**128`` draws
    per stream before any overlap.
    """
    seed = int(seed)
    replication = int(replication)
    if not (0 <= seed < 2**_SEED_BITS):
        raise ValueError(f"seed must lie in [0, 2**128), got {seed}")
    if replication < 0 or stream < 0:
        raise ValueError("replication and stream indices must be nonnegative")
    bitgen = np.random.Philox(key=seed, counter=[0, 0, replication, stream])
    return np.random.Generator(bitgen)

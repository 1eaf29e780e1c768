"""Seed derivation.

Every random draw in the package comes from a generator keyed by a root seed
and a tuple of non-negative integers (cell, replicate, purpose, ...). The same
key always yields the same stream, whichever process or thread asks for it.
"""

from __future__ import annotations

import numpy as np

# purpose codes, last-but-one element of a spawn key
DATA = 0
BOOT = 1
DIRECTIONS = 2
INIT = 3
ORACLE = 4


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for ``(seed, *key)``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))

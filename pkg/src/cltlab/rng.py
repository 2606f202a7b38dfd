"""Deterministic stream derivation for parallel Monte Carlo.

Every random draw in the package comes from a PCG64 generator keyed by a root
seed plus an integer path (branch, replication, component, ...). Streams with
different paths are statistically independent, and the same (seed, path) always
yields the same stream, so serial and thread-parallel runs produce identical
samples.
"""

from __future__ import annotations

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence]


def seed_path(seed: SeedLike, *path: int) -> np.random.SeedSequence:
    """Extend a root seed (or an already-derived sequence) by integer path steps."""
    steps = tuple(int(p) for p in path)
    if any(p < 0 for p in steps):
        raise ValueError("stream path components must be nonnegative")
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(
            entropy=seed.entropy, spawn_key=tuple(seed.spawn_key) + steps
        )
    return np.random.SeedSequence(entropy=int(seed), spawn_key=steps)


def stream(seed: SeedLike, *path: int) -> np.random.Generator:
    """Generator for the derived stream at (seed, *path)."""
    return np.random.Generator(np.random.PCG64(seed_path(seed, *path)))

"""Deterministic RNG stream derivation.

All randomness in the package flows through numpy Generators built here.
A master seed is split into independent streams with a fixed counter
scheme: stream (k1, k2, ...) of seed s is ``PCG64(SeedSequence(s,
spawn_key=(k1, k2, ...)))``.  Per-graph jobs in the CLI use the job index
as the spawn key, so job k of seed s is reproducible in isolation.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for stream ``key`` of ``seed``."""
    if key:
        ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    else:
        ss = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(ss))

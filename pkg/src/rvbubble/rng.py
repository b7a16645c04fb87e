"""Deterministic random-number streams for parallel Monte Carlo.

Every replication draws from its own counter-based (Philox) stream keyed by
``(seed, replication index, ...)``, so results are independent of execution
order and of how work is split across threads or processes.
"""
from __future__ import annotations

import numpy as np


def generator(*key: int) -> np.random.Generator:
    """Return the counter-based RNG stream for an integer key tuple.

    Distinct keys yield statistically independent streams; equal keys yield
    bit-identical streams on every platform.
    """
    if not key:
        raise ValueError("at least one integer key component is required")
    for k in key:
        if k < 0:
            raise ValueError(f"seed components must be non-negative, got {k}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def rademacher(rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw i.i.d. +/-1 multipliers with equal probability."""
    return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0

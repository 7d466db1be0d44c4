"""Memoryless Bernoulli erasure channel shared by all subsystems."""

import numpy as np


class ErasureChannel:
    """i.i.d. success draws with probability p, one per subsystem per slot.

    Draws are made for every subsystem whether or not it is scheduled, so a
    fixed seed yields one channel realization shared by all policies. Each
    draw thresholds a uniform against p, which also makes the realization
    pathwise monotone in p under a fixed seed.
    """

    def __init__(self, p: float, rng: np.random.Generator):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"success probability p={p} outside [0, 1]")
        self.p = float(p)
        self.rng = rng

    def draw_all(self, n: int) -> np.ndarray:
        """One slot's outcomes for n subsystems."""
        if n < 1:
            raise ValueError("need at least one subsystem")
        return self.rng.random(n) < self.p

    def draw_matrix(self, t: int, n: int) -> np.ndarray:
        """(t, n) outcomes for a whole horizon, row k = slot k."""
        if t < 1 or n < 1:
            raise ValueError("horizon and subsystem count must be positive")
        return self.rng.random((t, n)) < self.p

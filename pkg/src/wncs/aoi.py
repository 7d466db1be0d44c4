"""Age of Information bookkeeping, one age per subsystem.

The age at slot k is k - gen_time, where gen_time is the generation slot of
the freshest state the controller holds. The initial state is known at the
controller, so gen_time starts at 0 and ages start at 0.
"""

import numpy as np


class AoiTracker:
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one subsystem")
        self.delta = np.zeros(n, dtype=np.int64)
        self.gen_time = np.zeros(n, dtype=np.int64)
        self._last_slot = np.full(n, -1, dtype=np.int64)

    def update(self, i: int, success: bool, k: int) -> None:
        """Record slot k's reception outcome for subsystem i.

        Must be called exactly once per subsystem per slot, after the channel
        draw; a repeated update for the same slot is a logic error.
        """
        if k <= self._last_slot[i]:
            raise RuntimeError(f"subsystem {i} already updated for slot {self._last_slot[i]}")
        self._last_slot[i] = k
        if success:
            self.gen_time[i] = k
        self.delta[i] = k - self.gen_time[i]

    def update_all(self, received: np.ndarray, k: int) -> None:
        """Vectorized per-slot update for every subsystem at once."""
        if np.any(k <= self._last_slot):
            raise RuntimeError(f"slot {k} already recorded")
        self._last_slot[:] = k
        self.gen_time[received] = k
        np.subtract(k, self.gen_time, out=self.delta)

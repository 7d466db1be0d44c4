"""Scheduling policies: map current ages to a binary allocation.

Every policy grants exactly min(M, N) slots per decision. Score-based
policies break ties deterministically toward the lowest subsystem index.
"""

import numpy as np

from .offset import OffsetWeightTable

POLICY_NAMES = ("offset-greedy", "aoi-max", "est-error-max", "round-robin", "random")


def top_m(scores: np.ndarray, m: int) -> np.ndarray:
    """Boolean mask of the m largest scores, ties to the lowest index."""
    n = scores.shape[0]
    alpha = np.zeros(n, dtype=bool)
    order = np.argsort(-scores, kind="stable")
    alpha[order[: min(m, n)]] = True
    return alpha


class OffsetGreedy:
    """Grant the loops whose skipped-update cost gap would be largest."""

    name = "offset-greedy"

    def __init__(self, table: OffsetWeightTable, m: int):
        self.table = table
        self.m = m

    def allocate(self, ages: np.ndarray, k: int) -> np.ndarray:
        scores = np.array(
            [self.table.predicted_offset(i, int(d)) for i, d in enumerate(ages)]
        )
        return top_m(scores, self.m)


class MaxAoi:
    """Grant the loops with the largest age."""

    name = "aoi-max"

    def __init__(self, m: int):
        self.m = m

    def allocate(self, ages: np.ndarray, k: int) -> np.ndarray:
        return top_m(ages.astype(float), self.m)


class MaxEstimationError:
    """Grant the loops with the largest expected squared estimation error."""

    name = "est-error-max"

    def __init__(self, table: OffsetWeightTable, m: int):
        self.table = table
        self.m = m

    def allocate(self, ages: np.ndarray, k: int) -> np.ndarray:
        scores = np.array(
            [self.table.predicted_estimation_error(i, int(d)) for i, d in enumerate(ages)]
        )
        return top_m(scores, self.m)


class RoundRobin:
    """Grant a sliding window of M consecutive indices, wrapping modulo N."""

    name = "round-robin"

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = min(m, n)
        self.cursor = 0

    def allocate(self, ages: np.ndarray, k: int) -> np.ndarray:
        alpha = np.zeros(self.n, dtype=bool)
        alpha[(self.cursor + np.arange(self.m)) % self.n] = True
        self.cursor = (self.cursor + self.m) % self.n
        return alpha


class UniformRandom:
    """Grant a uniformly random M-subset each slot."""

    name = "random"

    def __init__(self, n: int, m: int, rng: np.random.Generator):
        self.n = n
        self.m = min(m, n)
        self.rng = rng

    def allocate(self, ages: np.ndarray, k: int) -> np.ndarray:
        alpha = np.zeros(self.n, dtype=bool)
        alpha[self.rng.permutation(self.n)[: self.m]] = True
        return alpha


def make_policy(name: str, *, table: OffsetWeightTable, n: int, m: int,
                rng: np.random.Generator):
    if name == "offset-greedy":
        return OffsetGreedy(table, m)
    if name == "aoi-max":
        return MaxAoi(m)
    if name == "est-error-max":
        return MaxEstimationError(table, m)
    if name == "round-robin":
        return RoundRobin(n, m)
    if name == "random":
        return UniformRandom(n, m, rng)
    raise ValueError(f"unknown policy {name!r}; expected one of {', '.join(POLICY_NAMES)}")

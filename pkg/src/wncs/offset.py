"""Per-age cost-offset weights and their running sums.

For a loop whose freshest update is j slots stale, the expected per-slot
quadratic cost gap against the perfectly-communicating reference is

    w(j) = Tr{ (Q + K'PK) D_j R D_j' },   D_j = A^j - (A + B K)^j

(w(0) = 0: one stale slot costs nothing, because the state one slot after a
reception is built from known information). The realized per-slot gap at age
d is the partial sum w(0) + ... + w(d-1); the score the greedy scheduler
ranks on is the same sum extended through w(d), i.e. next slot's gap if the
loop is skipped now.

The analogous estimation-error weights v(j) = Tr(A^j R A^j') feed the
estimation-error baseline policy with the same one-step-ahead horizon.
"""

import numpy as np

from .matrix import mat_pow, trace
from .model import SubsystemSpec, closed_loop_matrix


def offset_weight(spec: SubsystemSpec, j: int) -> float:
    """w(j) for one subsystem, computed directly (uncached)."""
    if j < 0:
        raise ValueError("age must be nonnegative")
    d = mat_pow(spec.A, j) - mat_pow(closed_loop_matrix(spec), j)
    s = spec.Q + spec.K.T @ spec.P @ spec.K
    return trace(s @ d @ spec.R @ d.T)


def expected_estimation_error(spec: SubsystemSpec, delta: int) -> float:
    """Expected squared estimation error one slot ahead if not updated.

    sum_{j=0}^{delta} Tr(A^j R A^j'); the j=0 term is Tr(R).
    """
    if delta < 0:
        raise ValueError("age must be nonnegative")
    total = 0.0
    a_pow = np.eye(spec.dim)
    for _ in range(delta + 1):
        total += trace(a_pow @ spec.R @ a_pow.T)
        a_pow = a_pow @ spec.A
    return total


def state_offset_after_misses(spec: SubsystemSpec, noise_window) -> np.ndarray:
    """Closed-form gap between the true state and the ideal reference.

    After len(noise_window) slots without a reception the gap is

        sum_{j=0}^{d-1} (A^j - (A+BK)^j) e[k-j-1]

    with the window ordered oldest-first. The anchor state cancels, so only
    the noise since the last reception enters.
    """
    window = [np.asarray(e, dtype=float) for e in noise_window]
    d = len(window)
    if d < 1:
        raise ValueError("noise window must cover at least one slot")
    n = spec.dim
    if any(e.shape != (n,) for e in window):
        raise ValueError("noise vectors must match the subsystem dimension")
    acl = closed_loop_matrix(spec)
    out = np.zeros(n)
    a_pow = np.eye(n)
    acl_pow = np.eye(n)
    for j in range(d):
        out = out + (a_pow - acl_pow) @ window[d - 1 - j]
        a_pow = a_pow @ spec.A
        acl_pow = acl_pow @ acl
    return out


class OffsetWeightTable:
    """Lazily grown per-(subsystem, age) weight cache with prefix sums.

    Powers of A and A+BK are extended incrementally, so warming the table to
    age d costs O(d) matrix products per subsystem no matter how often it is
    queried. Ages can reach the horizon under starvation.
    """

    def __init__(self, specs):
        self.specs = list(specs)
        if not self.specs:
            raise ValueError("need at least one subsystem")
        self._acl = [closed_loop_matrix(s) for s in self.specs]
        self._s = [s.Q + s.K.T @ s.P @ s.K for s in self.specs]
        n = len(self.specs)
        self._a_pow = [np.eye(s.dim) for s in self.specs]
        self._acl_pow = [np.eye(s.dim) for s in self.specs]
        self._w = [[] for _ in range(n)]
        self._csum = [[0.0] for _ in range(n)]
        self._v = [[] for _ in range(n)]
        self._vsum = [[0.0] for _ in range(n)]

    def _check_index(self, i: int) -> None:
        if not 0 <= i < len(self.specs):
            raise IndexError(f"subsystem index {i} out of range (have {len(self.specs)})")

    def _extend(self, i: int, j_max: int) -> None:
        spec = self.specs[i]
        w, csum = self._w[i], self._csum[i]
        v, vsum = self._v[i], self._vsum[i]
        while len(w) <= j_max:
            d = self._a_pow[i] - self._acl_pow[i]
            w.append(float(np.trace(self._s[i] @ d @ spec.R @ d.T)))
            csum.append(csum[-1] + w[-1])
            ar = self._a_pow[i] @ spec.R
            v.append(float(np.trace(ar @ self._a_pow[i].T)))
            vsum.append(vsum[-1] + v[-1])
            self._a_pow[i] = self._a_pow[i] @ spec.A
            self._acl_pow[i] = self._acl_pow[i] @ self._acl[i]

    def weight(self, i: int, j: int) -> float:
        """w_i(j)."""
        self._check_index(i)
        if j < 0:
            raise ValueError("age must be nonnegative")
        self._extend(i, j)
        return self._w[i][j]

    def cumulative_offset(self, i: int, delta: int) -> float:
        """Realized per-slot offset at age delta: sum of w(j) for j < delta."""
        self._check_index(i)
        if delta < 0:
            raise ValueError("age must be nonnegative")
        if delta > 0:
            self._extend(i, delta - 1)
        return self._csum[i][delta]

    def predicted_offset(self, i: int, delta: int) -> float:
        """Next-slot offset if subsystem i is not updated now.

        Equals cumulative_offset(i, delta + 1): one more term, w(delta).
        """
        return self.cumulative_offset(i, delta + 1)

    def predicted_estimation_error(self, i: int, delta: int) -> float:
        """Cached sum_{j=0}^{delta} v_i(j), the estimation-error score."""
        self._check_index(i)
        if delta < 0:
            raise ValueError("age must be nonnegative")
        self._extend(i, delta)
        return self._vsum[i][delta + 1]

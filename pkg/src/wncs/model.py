"""Per-subsystem LTI dynamics, estimator, and ideal-reference trajectory.

Each control loop follows, per slot k:

    x[k+1] = A x[k] + B u[k] + e[k]          plant, e ~ N(0, R), R diagonal
    u[k]   = K xhat[k]                        static state feedback
    xhat[k] = x[k]                            if the state update arrived
            = (A + B K) xhat[k-1]             otherwise (coast on the model)

The ideal reference x_ref is the trajectory the loop would follow if every
slot's update arrived, driven by the *same* noise realization, and re-anchored
to the true state at every successful reception. The gap x - x_ref is the
state cost offset the scheduler tries to keep small.
"""

from dataclasses import dataclass, field

import numpy as np

from .matrix import as_matrix, as_vector


@dataclass(frozen=True, eq=False)
class SubsystemSpec:
    """Constant parameters of one control loop.

    All matrices are n x n; R is the diagonal noise covariance, Q and P the
    state and control cost weights.
    """

    index: int
    A: np.ndarray
    B: np.ndarray
    K: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    R: np.ndarray
    x0: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "K", "Q", "P", "R"):
            object.__setattr__(self, name, as_matrix(getattr(self, name)))
        object.__setattr__(self, "x0", as_vector(self.x0))
        n = self.A.shape[0]
        for name in ("A", "B", "K", "Q", "P", "R"):
            m = getattr(self, name)
            if m.shape != (n, n):
                raise ValueError(
                    f"subsystem {self.index}: {name} has shape {m.shape}, expected {(n, n)}"
                )
        if self.x0.shape != (n,):
            raise ValueError(
                f"subsystem {self.index}: x0 has shape {self.x0.shape}, expected {(n,)}"
            )
        offdiag = self.R - np.diag(np.diag(self.R))
        if np.any(offdiag != 0.0) or np.any(np.diag(self.R) < 0.0):
            raise ValueError(f"subsystem {self.index}: R must be diagonal with nonnegative entries")
        for name in ("Q", "P"):
            m = getattr(self, name)
            if not np.array_equal(m, m.T):
                raise ValueError(f"subsystem {self.index}: {name} must be symmetric")
        for name in ("A", "B", "K", "Q", "P", "R", "x0"):
            getattr(self, name).setflags(write=False)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SubsystemSpec):
            return NotImplemented
        return self.index == other.index and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("A", "B", "K", "Q", "P", "R", "x0")
        )


def closed_loop_matrix(spec: SubsystemSpec) -> np.ndarray:
    """A + B K, governing the estimator coast and the ideal reference."""
    return spec.A + spec.B @ spec.K


def control(spec: SubsystemSpec, xhat: np.ndarray) -> np.ndarray:
    """u = K xhat."""
    if xhat.shape != (spec.dim,):
        raise ValueError(f"estimate has shape {xhat.shape}, expected {(spec.dim,)}")
    return spec.K @ xhat


def step_plant(spec: SubsystemSpec, x: np.ndarray, u: np.ndarray, e: np.ndarray) -> np.ndarray:
    """x_next = A x + B u + e."""
    n = spec.dim
    if x.shape != (n,) or u.shape != (n,) or e.shape != (n,):
        raise ValueError("state, control and noise must all match the subsystem dimension")
    return spec.A @ x + spec.B @ u + e


def step_estimator(spec: SubsystemSpec, xhat_prev: np.ndarray, received=None) -> np.ndarray:
    """New estimate: the received state if any, else a closed-loop coast."""
    if received is not None:
        received = np.asarray(received, dtype=float)
        if received.shape != (spec.dim,):
            raise ValueError(f"received state has shape {received.shape}, expected {(spec.dim,)}")
        return received.copy()
    if xhat_prev.shape != (spec.dim,):
        raise ValueError(f"estimate has shape {xhat_prev.shape}, expected {(spec.dim,)}")
    return closed_loop_matrix(spec) @ xhat_prev


def step_ideal(spec: SubsystemSpec, xref_prev: np.ndarray, e: np.ndarray, reanchor=None) -> np.ndarray:
    """Advance the ideal reference one slot.

    On a successful reception the reference snaps to the true state
    (`reanchor`), zeroing the offset; otherwise it evolves under perfect
    communication, (A + B K) xref + e, with the same noise as the plant.
    """
    if reanchor is not None:
        reanchor = np.asarray(reanchor, dtype=float)
        if reanchor.shape != (spec.dim,):
            raise ValueError(f"reanchor state has shape {reanchor.shape}, expected {(spec.dim,)}")
        return reanchor.copy()
    if xref_prev.shape != (spec.dim,) or e.shape != (spec.dim,):
        raise ValueError("reference state and noise must match the subsystem dimension")
    return closed_loop_matrix(spec) @ xref_prev + e


def state_after_misses(spec: SubsystemSpec, x_anchor: np.ndarray, noise_window) -> np.ndarray:
    """Closed-form state after a run of missed updates.

    Starting from `x_anchor` (the state at the last successful reception) and
    a run of `len(noise_window)` slots with no reception, the state is

        (A + B K)^d x_anchor + sum_{j=0}^{d-1} A^j e[k-j-1]

    with `noise_window` ordered oldest-first (e[k-d], ..., e[k-1]). This is
    the same vector the slot-by-slot recursion produces; tests hold the two
    routes together.
    """
    window = [np.asarray(e, dtype=float) for e in noise_window]
    d = len(window)
    if d < 1:
        raise ValueError("noise window must cover at least one slot")
    n = spec.dim
    if x_anchor.shape != (n,) or any(e.shape != (n,) for e in window):
        raise ValueError("anchor and noise vectors must match the subsystem dimension")
    acl = closed_loop_matrix(spec)
    acl_pow = np.eye(n)
    for _ in range(d):
        acl_pow = acl_pow @ acl
    out = acl_pow @ x_anchor
    a_pow = np.eye(n)
    for j in range(d):
        out = out + a_pow @ window[d - 1 - j]
        a_pow = a_pow @ spec.A
    return out


@dataclass
class NoiseSource:
    """Seeded i.i.d. zero-mean Gaussian noise with diagonal covariance R."""

    R: np.ndarray
    rng: np.random.Generator
    _scale: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.R = as_matrix(self.R)
        diag = np.diag(self.R)
        if np.any(self.R - np.diag(diag) != 0.0) or np.any(diag < 0.0):
            raise ValueError("noise covariance must be diagonal with nonnegative entries")
        self._scale = np.sqrt(diag)

    def draw(self) -> np.ndarray:
        return self.rng.standard_normal(self._scale.shape[0]) * self._scale

    def draw_block(self, t: int) -> np.ndarray:
        """(t, n) block of draws, one row per slot."""
        return self.rng.standard_normal((t, self._scale.shape[0])) * self._scale

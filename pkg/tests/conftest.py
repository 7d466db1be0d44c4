import numpy as np
import pytest

from wncs.model import SubsystemSpec

S = np.array([[1.0, 0.2], [-0.2, 1.0]])
I2 = np.eye(2)


def make_row1() -> SubsystemSpec:
    """First row of the time-sensitive preset; the hand-checked reference loop."""
    return SubsystemSpec(index=0, A=1.1 * S, B=I2, K=-0.2 * I2,
                         Q=100.0 * I2, P=I2, R=0.25 * I2, x0=[1.0, 1.0])


def make_random_spec(rng, dim=None, radius_limit=1.2) -> SubsystemSpec:
    """Random valid spec with the closed-loop spectral radius inside (0, limit)."""
    if dim is None:
        dim = int(rng.integers(2, 4))
    while True:
        a = rng.uniform(-0.7, 0.7, (dim, dim))
        b = rng.uniform(-0.7, 0.7, (dim, dim))
        k = rng.uniform(-0.5, 0.5, (dim, dim))
        rho = float(np.abs(np.linalg.eigvals(a + b @ k)).max())
        if 0.0 < rho < radius_limit:
            break
    g = rng.uniform(-1.0, 1.0, (dim, dim))
    q = g.T @ g
    h = rng.uniform(-1.0, 1.0, (dim, dim))
    p = h.T @ h
    q = (q + q.T) / 2.0
    p = (p + p.T) / 2.0
    r = np.diag(rng.uniform(0.05, 1.0, dim))
    return SubsystemSpec(index=0, A=a, B=b, K=k, Q=q, P=p, R=r,
                         x0=rng.uniform(-2.0, 2.0, dim))


def simulate_miss_run(spec: SubsystemSpec, anchor: np.ndarray, noise_window):
    """Slot-by-slot replay of a reception followed by only missed updates.

    Returns the state after each of the window's slots; the estimator starts
    exact at the anchor and coasts on the closed-loop model afterward.
    """
    from wncs.model import closed_loop_matrix, control, step_estimator, step_plant

    x = anchor.copy()
    xhat = anchor.copy()
    states = []
    for e in noise_window:
        u = control(spec, xhat)
        x = step_plant(spec, x, u, e)
        xhat = step_estimator(spec, xhat)
        states.append(x.copy())
    return states


@pytest.fixture
def row1():
    return make_row1()

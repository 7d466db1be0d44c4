"""Simulation runner, empiric costs, presets, and sweep orchestration.

Slot order inside the simulation, for each slot k:

  1. the scheduler picks an allocation from the ages on record (end of k-1),
  2. the channel draws one outcome per subsystem (scheduled or not),
  3. ages and the estimator/reference update on the reception outcome,
  4. the control is computed from the fresh estimate,
  5. the slot's cost terms are recorded,
  6. the plant and the ideal reference step to k+1 under the same noise.

Slot 0 is special only in that the initial state is already known at the
controller, so the estimator and reference start exact and age 0 is free.

Randomness comes from three SeedSequence substreams of the master seed
(per-subsystem noise, channel, policy), so the noise and channel realization
at a grid point are identical across policies and budgets.
"""

from dataclasses import dataclass, field, replace
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .aoi import AoiTracker
from .channel import ErasureChannel
from .matrix import identity, scalar_mul
from .model import NoiseSource, SubsystemSpec, closed_loop_matrix
from .offset import OffsetWeightTable
from .policies import POLICY_NAMES, make_policy


class DivergenceError(RuntimeError):
    """A state component left the configured magnitude guard."""

    def __init__(self, subsystem: int, slot: int, magnitude: float, limit: float):
        self.subsystem = subsystem
        self.slot = slot
        self.magnitude = magnitude
        super().__init__(
            f"subsystem {subsystem} diverged at slot {slot}: "
            f"|x| = {magnitude:.3e} exceeds limit {limit:.3e}"
        )


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    subsystems: tuple
    m: int
    p: float
    t: int = 5000
    policy: str = "offset-greedy"
    master_seed: int = 0
    replications: int = 10
    divergence_limit: float = 1e100

    def __post_init__(self):
        subs = tuple(self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        if not subs or not all(isinstance(s, SubsystemSpec) for s in subs):
            raise ValueError("subsystems must be a nonempty sequence of SubsystemSpec")
        n = len(subs)
        if not 1 <= self.m <= n:
            raise ValueError(f"m={self.m} outside [1, {n}] (n={n} subsystems)")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")
        if self.t < 1:
            raise ValueError(f"t={self.t} must be at least 1")
        if self.policy not in POLICY_NAMES:
            raise ValueError(
                f"unknown policy {self.policy!r}; expected one of {', '.join(POLICY_NAMES)}"
            )
        if self.replications < 1:
            raise ValueError(f"replications={self.replications} must be at least 1")
        if not self.divergence_limit > 0:
            raise ValueError("divergence_limit must be positive")

    @property
    def n(self) -> int:
        return len(self.subsystems)

    def __eq__(self, other):
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return (
            self.subsystems == other.subsystems
            and self.m == other.m
            and self.p == other.p
            and self.t == other.t
            and self.policy == other.policy
            and self.master_seed == other.master_seed
            and self.replications == other.replications
            and self.divergence_limit == other.divergence_limit
        )


@dataclass
class SlotTrace:
    """Per-slot, per-subsystem record of one run. Arrays are (T, N)."""

    delta: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    offset_term: np.ndarray
    lq_term: np.ndarray
    offset_quad: np.ndarray
    states: list = None
    estimates: list = None
    references: list = None
    noise: list = None

    def __post_init__(self):
        shape = self.delta.shape
        for name in ("alpha", "beta", "offset_term", "lq_term", "offset_quad"):
            a = getattr(self, name)
            if a.shape != shape:
                raise ValueError(f"trace field {name} has shape {a.shape}, expected {shape}")

    @property
    def t(self) -> int:
        return self.delta.shape[0]


@dataclass
class ExperimentResult:
    policy: str
    p: float
    m: int
    seed: int
    t: int
    empiric_offset: float
    empiric_lq: float
    empiric_offset_realized: float
    per_subsystem_lq: np.ndarray
    per_subsystem_offset: np.ndarray
    schedule_counts: np.ndarray
    trace: SlotTrace = None


def _stream(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def empiric_offset_cost(trace: SlotTrace) -> float:
    """Time-averaged analytic offset: (1/T) sum over slots and subsystems."""
    return float(trace.offset_term.sum() / trace.t)


def empiric_lq_cost(trace: SlotTrace) -> float:
    """Time-averaged realized quadratic cost: (1/T) sum of x'Qx + u'Pu."""
    return float(trace.lq_term.sum() / trace.t)


def run_simulation(config: ExperimentConfig, *, record_trace: bool = False,
                   record_states: bool = False) -> ExperimentResult:
    """Run one seeded simulation; deterministic given the config."""
    specs = config.subsystems
    n_sub = config.n
    t = config.t
    seed = config.master_seed

    table = OffsetWeightTable(specs)
    policy = make_policy(config.policy, table=table, n=n_sub, m=config.m,
                         rng=_stream(seed, 2))
    beta = ErasureChannel(config.p, _stream(seed, 1)).draw_matrix(t, n_sub)
    noise = [NoiseSource(spec.R, _stream(seed, 0, i)).draw_block(t)
             for i, spec in enumerate(specs)]

    trace = SlotTrace(
        delta=np.zeros((t, n_sub), dtype=np.int64),
        alpha=np.zeros((t, n_sub), dtype=bool),
        beta=beta,
        offset_term=np.zeros((t, n_sub)),
        lq_term=np.zeros((t, n_sub)),
        offset_quad=np.zeros((t, n_sub)),
    )
    if record_states:
        trace.states = [np.zeros((t, s.dim)) for s in specs]
        trace.estimates = [np.zeros((t, s.dim)) for s in specs]
        trace.references = [np.zeros((t, s.dim)) for s in specs]
        trace.noise = noise

    dims = {s.dim for s in specs}
    if len(dims) == 1:
        _run_stacked(config, table, policy, noise, trace, record_states)
    else:
        _run_general(config, table, policy, noise, trace, record_states)

    result = ExperimentResult(
        policy=config.policy,
        p=config.p,
        m=config.m,
        seed=seed,
        t=t,
        empiric_offset=empiric_offset_cost(trace),
        empiric_lq=empiric_lq_cost(trace),
        empiric_offset_realized=float(trace.offset_quad.sum() / t),
        per_subsystem_lq=trace.lq_term.sum(axis=0) / t,
        per_subsystem_offset=trace.offset_term.sum(axis=0) / t,
        schedule_counts=trace.alpha.sum(axis=0).astype(np.int64),
        trace=trace if (record_trace or record_states) else None,
    )
    return result


def _run_stacked(config, table, policy, noise, trace, record_states):
    """Inner loop with all subsystems stacked into (N, n, ...) arrays.

    Requires a common state dimension; numerically equivalent to the general
    loop, just fewer interpreter round-trips per slot.
    """
    specs = config.subsystems
    n_sub, t = config.n, config.t
    limit = config.divergence_limit
    a_st = np.stack([s.A for s in specs])
    b_st = np.stack([s.B for s in specs])
    k_st = np.stack([s.K for s in specs])
    q_st = np.stack([s.Q for s in specs])
    p_st = np.stack([s.P for s in specs])
    acl_st = np.stack([closed_loop_matrix(s) for s in specs])
    s_st = q_st + np.einsum("nji,njk,nkl->nil", k_st, p_st, k_st)
    e_st = np.stack(noise, axis=1)  # (T, N, n)

    x = np.stack([s.x0 for s in specs])
    xhat = x.copy()
    xref = x.copy()
    tracker = AoiTracker(n_sub)
    beta = trace.beta
    cum = table.cumulative_offset

    for k in range(t):
        alpha = policy.allocate(tracker.delta, k)
        recv = alpha & beta[k]
        tracker.update_all(recv, k)
        if k > 0:
            mask = recv[:, None]
            xhat = np.where(mask, x, np.einsum("nij,nj->ni", acl_st, xhat))
            xref = np.where(mask, x, xref)
        u = np.einsum("nij,nj->ni", k_st, xhat)

        delta_k = tracker.delta
        trace.delta[k] = delta_k
        trace.alpha[k] = alpha
        trace.offset_term[k] = [cum(i, int(d)) for i, d in enumerate(delta_k)]
        trace.lq_term[k] = (
            np.einsum("ni,nij,nj->n", x, q_st, x)
            + np.einsum("ni,nij,nj->n", u, p_st, u)
        )
        xbar = x - xref
        trace.offset_quad[k] = np.einsum("ni,nij,nj->n", xbar, s_st, xbar)
        if record_states:
            for i in range(n_sub):
                trace.states[i][k] = x[i]
                trace.estimates[i][k] = xhat[i]
                trace.references[i][k] = xref[i]

        e = e_st[k]
        x = np.einsum("nij,nj->ni", a_st, x) + np.einsum("nij,nj->ni", b_st, u) + e
        xref = np.einsum("nij,nj->ni", acl_st, xref) + e
        mags = np.abs(x).max(axis=1)
        if mags.max() > limit:
            i = int(mags.argmax())
            raise DivergenceError(i, k, float(mags[i]), limit)


def _run_general(config, table, policy, noise, trace, record_states):
    """Per-subsystem inner loop; handles mixed state dimensions."""
    specs = config.subsystems
    n_sub, t = config.n, config.t
    limit = config.divergence_limit
    acl = [closed_loop_matrix(s) for s in specs]
    s_mats = [s.Q + s.K.T @ s.P @ s.K for s in specs]

    x = [s.x0.copy() for s in specs]
    xhat = [s.x0.copy() for s in specs]
    xref = [s.x0.copy() for s in specs]
    tracker = AoiTracker(n_sub)
    beta = trace.beta

    for k in range(t):
        alpha = policy.allocate(tracker.delta, k)
        recv = alpha & beta[k]
        tracker.update_all(recv, k)
        for i, spec in enumerate(specs):
            if k > 0:
                if recv[i]:
                    xhat[i] = x[i].copy()
                    xref[i] = x[i].copy()
                else:
                    xhat[i] = acl[i] @ xhat[i]
            u = spec.K @ xhat[i]
            d = int(tracker.delta[i])
            trace.delta[k, i] = d
            trace.alpha[k, i] = alpha[i]
            trace.offset_term[k, i] = table.cumulative_offset(i, d)
            trace.lq_term[k, i] = float(x[i] @ (spec.Q @ x[i]) + u @ (spec.P @ u))
            xbar = x[i] - xref[i]
            trace.offset_quad[k, i] = float(xbar @ (s_mats[i] @ xbar))
            if record_states:
                trace.states[i][k] = x[i]
                trace.estimates[i][k] = xhat[i]
                trace.references[i][k] = xref[i]

            e = noise[i][k]
            x[i] = spec.A @ x[i] + spec.B @ u + e
            xref[i] = acl[i] @ xref[i] + e
            mag = float(np.abs(x[i]).max())
            if mag > limit:
                raise DivergenceError(i, k, mag, limit)


_S = [[1.0, 0.2], [-0.2, 1.0]]


def _preset(a_scales, q_scales, k_scales) -> tuple:
    s = np.array(_S)
    eye = identity(2)
    specs = []
    for i, (a, q, kk) in enumerate(zip(a_scales, q_scales, k_scales)):
        specs.append(SubsystemSpec(
            index=i,
            A=scalar_mul(a, s),
            B=eye,
            K=scalar_mul(kk, eye),
            Q=scalar_mul(q, eye),
            P=eye,
            R=scalar_mul(0.25, eye),
            x0=[1.0, 1.0],
        ))
    return tuple(specs)


def preset_table1() -> tuple:
    """Eight time-sensitive loops: open-loop unstable, mixed cost weights."""
    return _preset(
        a_scales=(1.1, 1.1, 1.2, 1.2, 1.3, 1.3, 1.4, 1.4),
        q_scales=(100.0, 100.0, 10.0, 8.0, 6.0, 4.0, 2.0, 1.0),
        k_scales=(-0.2, -0.3, -0.4, -0.6, -0.8, -1.0, -1.2, -1.2),
    )


def preset_table2() -> tuple:
    """Eight stable slow loops; some gains trade convergence speed for noise rejection."""
    return _preset(
        a_scales=(0.1, 0.1, 0.2, 0.2, 0.3, 0.3, 0.4, 0.4),
        q_scales=(1.0,) * 8,
        k_scales=(0.8, 0.75, 0.5, 0.455, -0.05, -0.1, -0.35, -0.38),
    )


PRESETS = {"table1": preset_table1, "table2": preset_table2}


def sweep(base: ExperimentConfig, p_values, m_values, policies, seeds,
          workers: int = 1) -> dict:
    """Run the full (policy, p, m, seed) cross product.

    Noise and channel realizations depend only on the seed, so each grid
    point is compared across policies under common random numbers. Results
    are keyed by (policy, p, m, seed).
    """
    p_values, m_values = list(p_values), list(m_values)
    policies, seeds = list(policies), list(seeds)
    if not (p_values and m_values and policies and seeds):
        raise ValueError("all sweep axes must be nonempty")
    points = [(pol, p, m, s)
              for pol in policies for p in p_values for m in m_values for s in seeds]
    configs = [replace(base, policy=pol, p=p, m=m, master_seed=s)
               for (pol, p, m, s) in points]
    if workers == 1:
        results = [run_simulation(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_simulation, configs, chunksize=4))
    return {point: res for point, res in zip(points, results)}


def mean_and_se(values) -> tuple:
    """Sample mean and standard error (0 for a single value)."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one value")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / np.sqrt(arr.size))

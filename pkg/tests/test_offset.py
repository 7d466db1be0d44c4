import numpy as np
import pytest

from wncs.model import SubsystemSpec
from wncs.offset import (
    OffsetWeightTable,
    expected_estimation_error,
    offset_weight,
    state_offset_after_misses,
)

from conftest import I2, S, make_random_spec, make_row1, make_random_spec as _make

# frozen from the hand/brute-force oracle computed before the build
W_ROW1 = {0: 0.0, 1: 2.0008, 2: 8.39055488, 3: 19.906917663232}


def brute_weight(spec, j):
    # independent route: numpy matrix_power instead of iterated products
    acl = spec.A + spec.B @ spec.K
    d = np.linalg.matrix_power(spec.A, j) - np.linalg.matrix_power(acl, j)
    s = spec.Q + spec.K.T @ spec.P @ spec.K
    return float(np.trace(s @ d @ spec.R @ d.T))


def test_weight_frozen_values(row1):
    assert offset_weight(row1, 0) == 0.0
    for j, expected in W_ROW1.items():
        assert abs(offset_weight(row1, j) - expected) <= 1e-9
        assert abs(brute_weight(row1, j) - expected) <= 1e-9  # oracle agrees with the freeze


def test_weight_matches_brute_force_on_random_specs():
    rng = np.random.default_rng(21)
    for _ in range(15):
        spec = make_random_spec(rng)
        for j in range(8):
            got = offset_weight(spec, j)
            want = brute_weight(spec, j)
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want))
            assert got >= -1e-12  # PSD-weighted Gram form


def test_weight_zero_when_loop_is_open(row1):
    spec = SubsystemSpec(index=0, A=1.1 * S, B=np.zeros((2, 2)), K=row1.K,
                         Q=row1.Q, P=row1.P, R=row1.R, x0=[1, 1])
    for j in range(10):
        assert offset_weight(spec, j) == 0.0


def test_cumulative_offset(row1):
    table = OffsetWeightTable([row1])
    assert table.cumulative_offset(0, 0) == 0.0
    assert table.cumulative_offset(0, 1) == 0.0  # one stale slot is free
    assert abs(table.cumulative_offset(0, 2) - 2.0008) <= 1e-9
    with pytest.raises(IndexError):
        table.cumulative_offset(1, 2)
    with pytest.raises(ValueError):
        table.cumulative_offset(0, -1)


def test_predicted_offset(row1):
    table = OffsetWeightTable([row1])
    assert table.predicted_offset(0, 0) == 0.0
    assert abs(table.predicted_offset(0, 1) - 2.0008) <= 1e-9
    assert abs(table.predicted_offset(0, 2) - 10.39135488) <= 1e-9
    for d in range(30):
        assert table.predicted_offset(0, d) == table.cumulative_offset(0, d + 1)
    with pytest.raises(IndexError):
        table.predicted_offset(3, 1)


def test_cumulative_monotone_and_cached(row1):
    rng = np.random.default_rng(17)
    specs = [row1, make_random_spec(rng, dim=2), make_random_spec(rng, dim=3)]
    table = OffsetWeightTable(specs)
    for i, spec in enumerate(specs):
        prev = -1.0
        for d in range(25):
            c = table.cumulative_offset(i, d)
            assert c >= prev
            prev = c
        # cached table agrees with the direct per-age computation
        for j in range(12):
            assert abs(table.weight(i, j) - offset_weight(spec, j)) <= 1e-9


def test_expected_estimation_error(row1):
    assert expected_estimation_error(row1, 0) == 0.5  # Tr(R)
    assert abs(expected_estimation_error(row1, 1) - 1.1292) <= 1e-12
    silent = SubsystemSpec(index=0, A=row1.A, B=row1.B, K=row1.K, Q=row1.Q,
                           P=row1.P, R=np.zeros((2, 2)), x0=[1, 1])
    for d in range(6):
        assert expected_estimation_error(silent, d) == 0.0
    table = OffsetWeightTable([row1])
    for d in range(15):
        want = expected_estimation_error(row1, d)
        got = table.predicted_estimation_error(0, d)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_state_offset_zero_cases(row1):
    rng = np.random.default_rng(2)
    # one stale slot: gap is identically zero whatever the noise
    assert np.array_equal(state_offset_after_misses(row1, [rng.normal(size=2)]), np.zeros(2))
    assert np.array_equal(state_offset_after_misses(row1, [np.zeros(2)] * 5), np.zeros(2))
    with pytest.raises(ValueError):
        state_offset_after_misses(row1, [])


def test_state_offset_matches_brute_force(row1):
    rng = np.random.default_rng(31)
    for _ in range(10):
        spec = make_random_spec(rng)
        acl = spec.A + spec.B @ spec.K
        for d in (1, 2, 3, 6):
            window = [rng.normal(size=spec.dim) for _ in range(d)]
            want = np.zeros(spec.dim)
            for j in range(d):
                dj = np.linalg.matrix_power(spec.A, j) - np.linalg.matrix_power(acl, j)
                want = want + dj @ window[d - 1 - j]
            got = state_offset_after_misses(spec, window)
            assert np.abs(got - want).max() <= 1e-10


def test_state_offset_matches_simulated_gap(row1):
    # replay the actual and ideal trajectories under shared noise
    rng = np.random.default_rng(41)
    acl = spec_acl = row1.A + row1.B @ row1.K
    for _ in range(20):
        anchor = rng.uniform(-2, 2, 2)
        window = [rng.normal(size=2) * 0.5 for _ in range(3)]
        x = anchor.copy()
        xhat = anchor.copy()
        xref = anchor.copy()
        for e in window:
            u = row1.K @ xhat
            x = row1.A @ x + row1.B @ u + e
            xhat = acl @ xhat
            xref = acl @ xref + e
        got = state_offset_after_misses(row1, window)
        assert np.abs(got - (x - xref)).max() <= 1e-10


def test_mean_quadratic_gap_tracks_cumulative_offset(row1):
    # small Monte-Carlo version; the full one runs in the acceptance suite
    rng = np.random.default_rng(51)
    table = OffsetWeightTable([row1])
    s_mat = row1.Q + row1.K.T @ row1.P @ row1.K
    n = 20000
    delta = 3
    sd = np.sqrt(np.diag(row1.R))
    quads = np.empty(n)
    for it in range(n):
        window = rng.standard_normal((delta, 2)) * sd
        xbar = state_offset_after_misses(row1, window)
        quads[it] = xbar @ s_mat @ xbar
    se = quads.std(ddof=1) / np.sqrt(n)
    assert abs(quads.mean() - table.cumulative_offset(0, delta)) <= 4.0 * se

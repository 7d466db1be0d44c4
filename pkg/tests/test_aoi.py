import numpy as np
import pytest

from wncs.aoi import AoiTracker


def test_reset_on_success():
    tr = AoiTracker(1)
    for k in range(1, 4):
        tr.update(0, False, k)
    assert tr.delta[0] == 3
    tr.update(0, True, 10)
    assert tr.delta[0] == 0
    assert tr.gen_time[0] == 10


def test_increment_on_failure():
    tr = AoiTracker(1)
    tr.update(0, False, 1)
    assert tr.delta[0] == 1


def test_failure_run_counts_slots():
    for run in (1, 3, 7):
        tr = AoiTracker(1)
        tr.update(0, True, 4)
        for k in range(5, 5 + run):
            tr.update(0, False, k)
        assert tr.delta[0] == run


def test_initial_state_counts_as_slot_zero_update():
    # a known initial state behaves like a reception at slot 0
    tr = AoiTracker(2)
    tr.update(0, False, 0)
    tr.update(1, True, 0)
    assert tr.delta[0] == 0 and tr.delta[1] == 0


def test_never_updated_age_equals_slot():
    tr = AoiTracker(1)
    for k in range(50):
        tr.update(0, False, k)
        assert tr.delta[0] == k


def test_always_updated_age_is_zero():
    tr = AoiTracker(3)
    for k in range(20):
        tr.update_all(np.ones(3, dtype=bool), k)
        assert np.all(tr.delta == 0)


def test_transitions_are_reset_or_increment():
    rng = np.random.default_rng(3)
    tr = AoiTracker(4)
    prev = tr.delta.copy()
    for k in range(200):
        recv = rng.random(4) < 0.3
        tr.update_all(recv, k)
        assert np.all(tr.delta >= 0)
        if k > 0:
            step = tr.delta - prev
            assert np.all((step == 1) | (tr.delta == 0))
        prev = tr.delta.copy()
        assert np.array_equal(tr.delta, k - tr.gen_time)


def test_double_update_rejected():
    tr = AoiTracker(2)
    tr.update(0, False, 3)
    with pytest.raises(RuntimeError):
        tr.update(0, True, 3)
    tr.update_all(np.array([False, True]), 4)
    with pytest.raises(RuntimeError):
        tr.update_all(np.array([False, False]), 4)


def test_update_all_matches_scalar_updates():
    rng = np.random.default_rng(8)
    a = AoiTracker(5)
    b = AoiTracker(5)
    for k in range(100):
        recv = rng.random(5) < 0.4
        a.update_all(recv, k)
        for i in range(5):
            b.update(i, bool(recv[i]), k)
        assert np.array_equal(a.delta, b.delta)
        assert np.array_equal(a.gen_time, b.gen_time)

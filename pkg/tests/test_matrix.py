import numpy as np
import pytest

from wncs.matrix import (
    as_matrix,
    as_vector,
    identity,
    mat_add,
    mat_mul,
    mat_pow,
    mat_sub,
    scalar_mul,
    trace,
    transpose,
)

S = np.array([[1.0, 0.2], [-0.2, 1.0]])


def test_mat_mul_identity():
    assert np.array_equal(mat_mul(identity(2), S), S)


def test_mat_mul_frozen_square():
    np.testing.assert_allclose(mat_mul(S, S), [[0.96, 0.4], [-0.4, 0.96]], atol=1e-15)


def test_mat_mul_zero():
    z = np.zeros((2, 2))
    assert np.array_equal(mat_mul(S, z), z)


def test_mat_mul_shape_mismatch():
    with pytest.raises(ValueError):
        mat_mul(np.ones((2, 3)), np.ones((2, 3)))


def test_mat_pow_examples():
    assert np.array_equal(mat_pow(S, 0), identity(2))
    np.testing.assert_allclose(mat_pow(S, 2), mat_mul(S, S), atol=0)
    assert np.array_equal(mat_pow(identity(2), 7), identity(2))


def test_mat_pow_rejects_bad_input():
    with pytest.raises(ValueError):
        mat_pow(np.ones((2, 3)), 2)
    with pytest.raises(ValueError):
        mat_pow(S, -1)


def test_trace_examples():
    assert trace(identity(2)) == 2.0
    assert trace(scalar_mul(0.25, identity(2))) == 0.5
    assert trace(S) == 2.0
    with pytest.raises(ValueError):
        trace(np.ones((2, 3)))


def test_elementwise_examples():
    assert np.array_equal(transpose(np.array([[0.0, 1.0], [-1.0, 0.0]])),
                          [[0.0, -1.0], [1.0, 0.0]])
    assert np.array_equal(mat_sub(S, S), np.zeros((2, 2)))
    np.testing.assert_allclose(scalar_mul(1.1, S), [[1.1, 0.22], [-0.22, 1.1]], atol=1e-15)
    with pytest.raises(ValueError):
        mat_add(S, np.ones((3, 3)))
    with pytest.raises(ValueError):
        mat_sub(S, np.ones((3, 3)))


def test_constructors_reject_nonfinite():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(ValueError):
        as_matrix([[np.inf, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])
    with pytest.raises(ValueError):
        as_matrix([1.0, 2.0])


def test_pow_recurrence_exact():
    # mat_pow multiplies on the right, so the recurrence holds bit for bit
    rng = np.random.default_rng(11)
    for dim in (2, 3):
        for _ in range(5):
            a = rng.uniform(-1.0, 1.0, (dim, dim))
            for j in range(13):
                assert np.array_equal(mat_pow(a, j + 1), mat_mul(mat_pow(a, j), a))


def test_trace_linearity_and_cyclicity():
    rng = np.random.default_rng(12)
    for dim in (2, 3, 4):
        for _ in range(10):
            a = rng.uniform(-2.0, 2.0, (dim, dim))
            b = rng.uniform(-2.0, 2.0, (dim, dim))
            lhs = trace(mat_add(a, b))
            rhs = trace(a) + trace(b)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
            lhs = trace(mat_mul(a, b))
            rhs = trace(mat_mul(b, a))
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_transpose_involution_exact():
    rng = np.random.default_rng(13)
    a = rng.uniform(-5.0, 5.0, (3, 3))
    assert np.array_equal(transpose(transpose(a)), a)

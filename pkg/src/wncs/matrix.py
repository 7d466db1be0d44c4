"""Small dense real-matrix helpers shared by the simulator modules.

Everything is a float64 numpy array; these wrappers add the dimension and
finiteness checks the rest of the package relies on. Powers are computed by
iterated multiplication (exponents are bounded by the largest observed AoI,
and the offset module caches them incrementally).
"""

import numpy as np


def as_matrix(entries) -> np.ndarray:
    """Validated 2-D float64 matrix from nested sequences or an array."""
    a = np.array(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def as_vector(entries) -> np.ndarray:
    """Validated 1-D float64 vector."""
    v = np.array(entries, dtype=float)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError("vector entries must be finite")
    return v


def identity(n: int) -> np.ndarray:
    return np.eye(n)


def _require_square(a: np.ndarray, op: str) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{op} requires a square matrix, got shape {a.shape}")


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"incompatible shapes for product: {a.shape} x {b.shape}")
    return a @ b


def mat_pow(a: np.ndarray, j: int) -> np.ndarray:
    """a**j by repeated right-multiplication; a**0 is the identity."""
    _require_square(a, "mat_pow")
    if j < 0 or int(j) != j:
        raise ValueError(f"exponent must be a nonnegative integer, got {j}")
    out = np.eye(a.shape[0])
    for _ in range(int(j)):
        out = out @ a
    return out


def trace(a: np.ndarray) -> float:
    _require_square(a, "trace")
    return float(np.trace(a))


def transpose(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a.T)


def mat_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch for add: {a.shape} vs {b.shape}")
    return a + b


def mat_sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch for sub: {a.shape} vs {b.shape}")
    return a - b


def scalar_mul(c: float, a: np.ndarray) -> np.ndarray:
    return float(c) * a

"""Dense float64 primitives behind the loss, encoders, and metrics.

Vectors and matrices are plain row-major numpy arrays in 64-bit floats;
exported files use 32-bit floats, the conversion happens only at the I/O
boundary.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatchError, NotFiniteError, ZeroVectorError

ZERO_NORM_EPS = 1e-12


def as_f64(a) -> np.ndarray:
    return np.asarray(a, dtype=np.float64)


def check_finite(a: np.ndarray, name: str = "array") -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise NotFiniteError(f"{name} contains non-finite entries")
    return a


def l2_normalize(v) -> np.ndarray:
    """Scale a vector to unit Euclidean norm, preserving direction."""
    v = as_f64(v)
    norm = float(np.linalg.norm(v))
    if norm < ZERO_NORM_EPS:
        raise ZeroVectorError(f"cannot normalize vector with norm {norm:.3e}")
    return v / norm


def l2_normalize_rows(m) -> np.ndarray:
    """Row-wise unit normalization of a 2-D array."""
    m = as_f64(m)
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms < ZERO_NORM_EPS):
        bad = int(np.argmin(norms))
        raise ZeroVectorError(f"row {bad} has norm {norms[bad]:.3e}")
    return m / norms[:, None]


def l2_normalize_rows_with_norms(m) -> tuple[np.ndarray, np.ndarray]:
    """Row normalization that also returns the original row norms."""
    m = as_f64(m)
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms < ZERO_NORM_EPS):
        bad = int(np.argmin(norms))
        raise ZeroVectorError(f"row {bad} has norm {norms[bad]:.3e}")
    return m / norms[:, None], norms


def normalize_rows_backward(unit_rows: np.ndarray, d_unit: np.ndarray, norms: np.ndarray) -> np.ndarray:
    """Chain rule through row-wise unit normalization.

    For y = z / |z| with |z| = r, the gradient w.r.t. z is
    (dy - (y . dy) y) / r per row.
    """
    inner = (unit_rows * d_unit).sum(axis=1, keepdims=True)
    return (d_unit - inner * unit_rows) / norms[:, None]


def similarity_logits(u_rows, v_rows, tau: float) -> np.ndarray:
    """Scaled pairwise dot products: out[i, j] = tau * (u_i . v_j).

    Both inputs must have the same (rows, cols) shape. einsum keeps the
    reduction order identical for (U, V) and (V, U), so the transpose
    symmetry of the two loss terms holds bitwise.
    """
    u = as_f64(u_rows)
    v = as_f64(v_rows)
    if u.ndim != 2 or v.ndim != 2:
        raise DimMismatchError("similarity_logits expects 2-D arrays")
    if u.shape != v.shape:
        raise DimMismatchError(f"shape mismatch: {u.shape} vs {v.shape}")
    return tau * np.einsum("ik,jk->ij", u, v)


def log_softmax_rows(m) -> np.ndarray:
    """Row-wise log-softmax with max-subtraction for stability.

    Input is copied to row-major layout first so the row reductions
    round identically whether the caller passes an array or its
    transposed view; f(M.T) stays bitwise equal to f(M)'s transpose
    whenever the entries match bitwise.
    """
    m = np.ascontiguousarray(as_f64(m))
    if m.ndim != 2:
        raise DimMismatchError("log_softmax_rows expects a 2-D array")
    check_finite(m, "logits")
    shifted = m - m.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return shifted - lse


def softmax_rows(m) -> np.ndarray:
    return np.exp(log_softmax_rows(m))

"""Spectral primitives for symmetric matrices.

Everything here operates on real symmetric ndarrays.  Eigen-decompositions
are delegated to LAPACK through numpy; a non-converged solve raises
``numpy.linalg.LinAlgError`` rather than returning garbage.
"""

from __future__ import annotations

import math

import numpy as np


def _check_symmetric(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.array_equal(M, M.T):
        if not np.allclose(M, M.T, rtol=0.0, atol=1e-12):
            raise ValueError("matrix is not symmetric")
    return M


def operator_norm(M: np.ndarray) -> float:
    """Spectral norm of a symmetric matrix: max_i |lambda_i(M)|."""
    M = _check_symmetric(M)
    if not M.size:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(M))))


def frobenius_norm(M: np.ndarray) -> float:
    """Entrywise l2 norm sqrt(sum_ij M_ij^2)."""
    return float(np.linalg.norm(np.asarray(M, dtype=np.float64), "fro"))


def inner_product(A: np.ndarray, B: np.ndarray) -> float:
    """Trace inner product <A, B> = sum_ij A_ij B_ij."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.sum(A * B))


def sym_eigen(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-pairs of a symmetric matrix, sorted by |lambda| descending.

    Ties in |lambda| are broken by signed value descending, so +c sorts
    before -c.  Returns (values, vectors) with vectors[:, k] the unit
    eigenvector for values[k].
    """
    M = _check_symmetric(M)
    vals, vecs = np.linalg.eigh(M)
    order = np.lexsort((-vals, -np.abs(vals)))
    return vals[order], vecs[:, order]


def usvt(M: np.ndarray, tau2: float, tau4: float = math.inf) -> np.ndarray:
    """Spectral hard-threshold followed by an entrywise clip.

    Keeps the eigen-pairs with |lambda_i| >= tau2, reconstructs
    sum_i lambda_i v_i v_i^T from them, then clips every entry to
    [-tau4, tau4].  ``tau4 = math.inf`` disables the clip.  The output is
    exactly symmetric.
    """
    if tau2 < 0:
        raise ValueError(f"tau2 must be >= 0, got {tau2}")
    if tau4 < 0:
        raise ValueError(f"tau4 must be >= 0, got {tau4}")
    vals, vecs = sym_eigen(M)
    keep = np.abs(vals) >= tau2
    if not keep.any():
        return np.zeros_like(np.asarray(M, dtype=np.float64))
    v = vecs[:, keep]
    out = (v * vals[keep]) @ v.T
    out = (out + out.T) / 2.0
    if math.isfinite(tau4):
        np.clip(out, -tau4, tau4, out=out)
    return out

"""Dense matrix helpers: validation, SVD, truncated SVD and Frobenius utilities.

Matrices are plain 2-D ``numpy.ndarray`` of dtype float64. Every function
here is pure; inputs are never modified.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float64 array, or raise ValidationError."""
    A = np.asarray(M, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2 or A.size == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} contains NaN or Inf")
    return A


def check_same_shape(A, B, names=("A", "B")):
    if A.shape != B.shape:
        raise ValidationError(
            f"shape mismatch: {names[0]} is {A.shape}, {names[1]} is {B.shape}")


@dataclass(frozen=True)
class SvdTriple:
    """Thin SVD ``M = U @ diag(sigma) @ V.T`` with descending ``sigma``."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self, k=None):
        k = len(self.sigma) if k is None else k
        return (self.U[:, :k] * self.sigma[:k]) @ self.V[:, :k].T


def svd(M):
    """Thin SVD of ``M`` with a deterministic sign convention.

    Each left singular vector is flipped so that its largest-magnitude
    entry is positive (first such entry on ties); the matching right vector
    is flipped with it.
    """
    A = as_matrix(M)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U = U * signs
    V = Vt.T * signs
    return SvdTriple(U=U, sigma=s, V=V)


def truncated_svd(M, K):
    """Best rank-``K`` approximation of ``M`` in Frobenius norm.

    Keeps the first ``K`` singular triples as returned by :func:`svd`; when
    ``sigma[K-1] == sigma[K]`` this is one of several optima, chosen
    deterministically. For ``K >= min(M.shape)`` a copy of ``M`` is returned.
    """
    A = as_matrix(M)
    if int(K) != K or K < 1:
        raise ValidationError(f"rank bound K must be a positive integer, got {K}")
    K = int(K)
    if K >= min(A.shape):
        return A.copy()
    return svd(A).reconstruct(K)


def frob_dist(A, B):
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    check_same_shape(A, B)
    return float(np.linalg.norm(A - B, "fro"))


def numerical_rank(M, tol=1e-9):
    """Number of singular values strictly greater than ``tol * sigma_1``."""
    A = as_matrix(M)
    if tol <= 0:
        raise ValidationError("tol must be positive")
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def tail_energy(M, K):
    """Sum of squared singular values beyond the first ``K``."""
    s = np.linalg.svd(as_matrix(M), compute_uv=False)
    return float(np.sum(s[K:] ** 2))

"""Truncated SVD projection for the eigenspace (EFCM) baseline."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, RankTooLargeError

OVERSAMPLE = 10
POWER_ITERS = 7


@dataclass
class TruncatedSvd:
    k: int
    right_vectors: np.ndarray  # (n_terms, k), orthonormal columns
    singular_values: np.ndarray  # (k,), nonincreasing


def _as_operator(D):
    if hasattr(D, "matrix"):
        return D.matrix
    return D


def _fix_signs(V: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry nonnegative."""
    V = V.copy()
    for j in range(V.shape[1]):
        i = np.argmax(np.abs(V[:, j]))
        if V[i, j] < 0:
            V[:, j] = -V[:, j]
    return V


def dense_truncated_svd(D, p: int) -> TruncatedSvd:
    """Exact dense decomposition; fallback and test oracle for small matrices."""
    A = _as_operator(D)
    if sp.issparse(A):
        A = A.toarray()
    A = np.asarray(A, dtype=np.float64)
    if p > min(A.shape):
        raise RankTooLargeError(f"rank {p} exceeds min{A.shape}")
    _, s, Vt = np.linalg.svd(A, full_matrices=False)
    return TruncatedSvd(p, _fix_signs(Vt[:p].T), s[:p])


def truncated_svd(D, p: int, seed: int = 0) -> TruncatedSvd:
    """Top-p singular triplets via randomized block power iteration.

    Gaussian range sketch with fixed oversampling, re-orthonormalized
    power iterations, then an exact SVD of the small projected matrix.
    Deterministic per seed.
    """
    A = _as_operator(D)
    n, m = A.shape
    if p > min(n, m):
        raise RankTooLargeError(f"rank {p} exceeds min(({n}, {m}))")
    rng = np.random.default_rng(seed)
    l = min(p + OVERSAMPLE, min(n, m))

    G = rng.standard_normal((m, l))
    Q, _ = np.linalg.qr(np.asarray(A @ G))
    for _ in range(POWER_ITERS):
        W, _ = np.linalg.qr(np.asarray(A.T @ Q))
        Q, _ = np.linalg.qr(np.asarray(A @ W))
    B = np.asarray(Q.T @ A)  # (l, m)
    _, s, Vt = np.linalg.svd(B, full_matrices=False)
    return TruncatedSvd(p, _fix_signs(Vt[:p].T), s[:p])


def project(D, svd: TruncatedSvd) -> np.ndarray:
    """Document coordinates in the eigenspace: D @ V_p."""
    A = _as_operator(D)
    if A.shape[1] != svd.right_vectors.shape[0]:
        raise DimensionMismatchError(
            f"matrix has {A.shape[1]} columns, SVD expects {svd.right_vectors.shape[0]}"
        )
    return np.asarray(A @ svd.right_vectors)


def back_project(C, svd: TruncatedSvd) -> np.ndarray:
    """Map eigenspace vectors back to term space: C @ V_p^T."""
    C = np.asarray(C, dtype=np.float64)
    if C.shape[1] != svd.k:
        raise DimensionMismatchError(
            f"input has {C.shape[1]} columns, SVD rank is {svd.k}"
        )
    return C @ svd.right_vectors.T

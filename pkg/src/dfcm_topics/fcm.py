"""Fuzzy c-means clustering with best-of-N k-means initialization.

Works on any real-valued data matrix: the autoencoder code space in the
DFCM pipeline, the eigenspace in the EFCM baseline.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyClusterError,
    InvalidFuzzifierError,
    NonFiniteInputError,
    TooFewPointsError,
)

COINCIDENT_TOL = 1e-12
KMEANS_MAX_ITER = 300


@dataclass
class FcmConfig:
    c: int
    f: float = 1.1
    max_iter: int = 1000
    eps: float = 0.005
    seed: int = 0
    init_runs: int = 10

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("cluster count must be >= 1")
        if self.f <= 1.0:
            raise InvalidFuzzifierError("fuzzification constant must be > 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.eps <= 0:
            raise ValueError("eps must be > 0")


@dataclass
class FcmResult:
    memberships: np.ndarray  # (c, n), columns sum to 1
    centroids: np.ndarray  # (c, d)
    objective_trace: list[float]
    iterations: int
    converged: bool


def _sq_distances(X: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, shape (c, n)."""
    d2 = (
        np.sum(Q**2, axis=1)[:, None]
        - 2.0 * Q @ X.T
        + np.sum(X**2, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int = KMEANS_MAX_ITER):
    """Lloyd's algorithm from given centers; returns (centers, labels, sse)."""
    n = X.shape[0]
    for _ in range(max_iter):
        d2 = _sq_distances(X, centers)
        labels = np.argmin(d2, axis=0)  # ties break to lowest index
        new_centers = centers.copy()
        for i in range(centers.shape[0]):
            mask = labels == i
            if mask.any():
                new_centers[i] = X[mask].mean(axis=0)
            else:
                # Reseed an empty cluster to the point farthest from its
                # nearest centroid.
                nearest = d2[labels, np.arange(n)]
                new_centers[i] = X[np.argmax(nearest)]
        if np.allclose(new_centers, centers, rtol=0.0, atol=1e-12):
            centers = new_centers
            break
        centers = new_centers
    d2 = _sq_distances(X, centers)
    labels = np.argmin(d2, axis=0)
    sse = float(d2[labels, np.arange(n)].sum())
    return centers, labels, sse


def _kmeans_pp_seed(X: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: sample centers proportional to squared distance."""
    n = X.shape[0]
    centers = np.empty((c, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    for i in range(1, c):
        d2 = _sq_distances(X, centers[:i]).min(axis=0)
        total = d2.sum()
        if total <= 0.0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers[i] = X[idx]
    return centers


def kmeans_init(X: np.ndarray, c: int, runs: int = 10, seed: int = 0) -> np.ndarray:
    """Best of `runs` k-means++/Lloyd runs by within-cluster SSE."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < c:
        raise TooFewPointsError(f"{X.shape[0]} points < {c} clusters")
    rng = np.random.default_rng(seed)
    best_centers, best_sse = None, np.inf
    for _ in range(max(1, runs)):
        centers = _kmeans_pp_seed(X, c, rng)
        centers, _, sse = _lloyd(X, centers)
        if sse < best_sse:
            best_centers, best_sse = centers, sse
    return best_centers


def update_memberships(X: np.ndarray, Q: np.ndarray, f: float) -> np.ndarray:
    """Membership update for fixed centroids.

    m_ik = [ sum_j (||a_k - q_i|| / ||a_k - q_j||)^(2/(f-1)) ]^-1. Points
    coinciding with one or more centroids get their membership split
    uniformly over the coincident centroids.
    """
    if f <= 1.0:
        raise InvalidFuzzifierError("fuzzification constant must be > 1")
    d = np.sqrt(_sq_distances(X, Q))  # (c, n)
    expo = 2.0 / (f - 1.0)
    dmin = d.min(axis=0)
    M = np.zeros_like(d)

    regular = dmin >= COINCIDENT_TOL
    if regular.any():
        # Normalize by the column minimum so ratios are >= 1 and the
        # negative power cannot overflow for small f.
        ratio = d[:, regular] / dmin[regular]
        w = ratio ** (-expo)
        M[:, regular] = w / w.sum(axis=0)

    coincident = ~regular
    if coincident.any():
        hits = d[:, coincident] < COINCIDENT_TOL
        M[:, coincident] = hits / hits.sum(axis=0)
    return M


def update_centroids(X: np.ndarray, M: np.ndarray, f: float) -> np.ndarray:
    """Centroid update for fixed memberships: weighted mean with weights m^f."""
    W = M**f
    sums = W.sum(axis=1)
    if np.any(sums <= 0.0):
        raise EmptyClusterError("a cluster's membership weights sum to zero")
    return (W @ X) / sums[:, None]


def objective(X: np.ndarray, M: np.ndarray, Q: np.ndarray, f: float) -> float:
    """Fuzzy within-cluster scatter J = sum_ik m_ik^f ||a_k - q_i||^2."""
    return float(np.sum(M**f * _sq_distances(X, Q)))


def fcm_fit(
    X: np.ndarray, config: FcmConfig, init: np.ndarray | None = None
) -> FcmResult:
    """Alternate membership/centroid updates until t > T or ||dM||_F < eps.

    The convergence check is skipped on the first iteration (there is no
    previous membership matrix). Deterministic given config.seed.
    """
    X = np.asarray(X, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise NonFiniteInputError("data matrix contains NaN or Inf")
    if X.shape[0] < config.c:
        raise TooFewPointsError(f"{X.shape[0]} points < {config.c} clusters")

    Q = (
        np.asarray(init, dtype=np.float64)
        if init is not None
        else kmeans_init(X, config.c, config.init_runs, config.seed)
    )
    trace: list[float] = []
    M_prev = None
    converged = False
    t = 0
    while t < config.max_iter:
        t += 1
        M = update_memberships(X, Q, config.f)
        Q = update_centroids(X, M, config.f)
        trace.append(objective(X, M, Q, config.f))
        if M_prev is not None and np.linalg.norm(M - M_prev) < config.eps:
            converged = True
            M_prev = M
            break
        M_prev = M
    return FcmResult(M_prev, Q, trace, t, converged)

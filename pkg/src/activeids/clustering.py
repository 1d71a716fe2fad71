"""k-means clustering used as a query-diversification device.

Lloyd iteration with k-means++ seeding on the standardized feature
matrix. Empty clusters are repaired by stealing the point farthest from
its assigned centroid, so every cluster keeps at least one member and the
one-sample-per-cluster sampling contract holds downstream.
"""

from dataclasses import dataclass

import numpy as np

from .kernels import nearest_centroids


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class Clustering:
    k: int
    centroids: np.ndarray
    assignment: np.ndarray
    inertia: float
    iterations: int
    # Inertia recorded after every assignment step; nonincreasing.
    inertia_history: tuple[float, ...]

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster)


def _as_matrix(m) -> np.ndarray:
    values = m.values if hasattr(m, "values") else m
    X = np.ascontiguousarray(values, dtype=np.float64)
    if X.ndim != 2:
        raise ClusteringError("expected a 2-D feature matrix")
    return X


def _plusplus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = X[first]
    diff = X - centroids[0]
    d2 = np.einsum("ij,ij->i", diff, diff)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            # All remaining points coincide with a centroid; any pick works.
            idx = int(rng.integers(n))
        else:
            target = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), target, side="right"))
            idx = min(idx, n - 1)
        centroids[j] = X[idx]
        diff = X - centroids[j]
        d2 = np.minimum(d2, np.einsum("ij,ij->i", diff, diff))
    return centroids


def kmeans_fit(m, k: int, seed: int, max_iters: int = 100, tol: float = 1e-4) -> Clustering:
    """Cluster rows of m into k groups; deterministic given the seed."""
    X = _as_matrix(m)
    n = X.shape[0]
    if k < 1:
        raise ClusteringError("k must be at least 1")
    if k > n:
        raise ClusteringError(f"k={k} exceeds row count {n}")

    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(X, k, rng)

    history: list[float] = []
    assignment = np.zeros(n, dtype=np.int64)
    iterations = 0
    for iterations in range(1, max_iters + 1):
        assignment, sqdist = nearest_centroids(X, centroids)
        history.append(float(sqdist.sum()))

        new_centroids = np.empty_like(centroids)
        counts = np.bincount(assignment, minlength=k)
        for c in range(k):
            if counts[c] > 0:
                new_centroids[c] = X[assignment == c].mean(axis=0)
        for c in np.flatnonzero(counts == 0):
            # Empty-cluster repair: the farthest point becomes the centroid.
            stolen = int(np.argmax(sqdist))
            new_centroids[c] = X[stolen]
            sqdist[stolen] = 0.0

        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        if shift < tol:
            break

    # Final assignment against the final centroids, so the nearest-centroid
    # invariant holds exactly on the returned object.
    assignment, sqdist = nearest_centroids(X, centroids)
    history.append(float(sqdist.sum()))
    attempts = 0
    while (np.bincount(assignment, minlength=k) == 0).any():
        # A repair landed on the last iteration; settle remaining empties.
        attempts += 1
        if attempts > k:
            raise ClusteringError("fewer distinct points than clusters")
        counts = np.bincount(assignment, minlength=k)
        for c in np.flatnonzero(counts == 0):
            stolen = int(np.argmax(sqdist))
            centroids[c] = X[stolen]
            sqdist[stolen] = 0.0
        assignment, sqdist = nearest_centroids(X, centroids)
        history.append(float(sqdist.sum()))

    return Clustering(
        k=k,
        centroids=centroids,
        assignment=assignment,
        inertia=float(sqdist.sum()),
        iterations=iterations,
        inertia_history=tuple(history),
    )


def assign(point, c: Clustering) -> int:
    """Nearest-centroid index for one point; ties go to the lowest index."""
    p = np.asarray(point, dtype=np.float64).reshape(1, -1)
    if p.shape[1] != c.centroids.shape[1]:
        raise ClusteringError(
            f"point dimension {p.shape[1]} != centroid dimension {c.centroids.shape[1]}"
        )
    idx, _ = nearest_centroids(p, c.centroids)
    return int(idx[0])

"""Pure-numpy implementations of the hot kernels.

Used when the compiled extension is unavailable (or forced via
ACTIVEIDS_PURE=1). Same contracts as ``activeids.kernels._fast``.
"""

import numpy as np


def nearest_centroids(X, C):
    """Assign each row of X to its nearest centroid in C.

    Returns (assignment, sqdist): per-row centroid index (ties broken by
    the lowest index, matching np.argmin) and squared Euclidean distance
    to that centroid.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    n = X.shape[0]
    k = C.shape[0]
    d2 = np.empty((n, k), dtype=np.float64)
    for j in range(k):
        diff = X - C[j]
        d2[:, j] = np.einsum("ij,ij->i", diff, diff)
    assignment = np.argmin(d2, axis=1).astype(np.int64)
    sqdist = d2[np.arange(n), assignment]
    return assignment, sqdist


def forest_votes(feat, thresh, left, right, leaf, roots, X):
    """Count attack votes per row over a flattened forest.

    Trees are stored as parallel arrays: feat[i] is the split feature of
    node i (-1 marks a leaf), thresh/left/right the split parameters, and
    leaf[i] the class of a leaf node. roots holds each tree's root index.
    Rows go left when X[r, feat] <= thresh.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    votes = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    for root in roots:
        node = np.full(n, root, dtype=np.int64)
        active = feat[node] >= 0
        while np.any(active):
            idx = node[active]
            go_left = X[rows[active], feat[idx]] <= thresh[idx]
            node[active] = np.where(go_left, left[idx], right[idx])
            active = feat[node] >= 0
        votes += leaf[node]
    return votes

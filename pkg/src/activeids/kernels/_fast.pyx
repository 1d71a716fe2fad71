# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Contracts match ``activeids.kernels._pure`` exactly; see that module for
parameter documentation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def nearest_centroids(X, C):
    cdef double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[:, ::1] c = np.ascontiguousarray(C, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t k = c.shape[0]

    assignment = np.empty(n, dtype=np.int64)
    sqdist = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] a = assignment
    cdef double[::1] s = sqdist

    cdef Py_ssize_t i, j, m, best_idx
    cdef double best, acc, diff
    for i in range(n):
        best = INFINITY
        best_idx = 0
        for j in range(k):
            acc = 0.0
            for m in range(d):
                diff = x[i, m] - c[j, m]
                acc += diff * diff
                if acc > best:
                    break
            if acc < best:
                best = acc
                best_idx = j
        a[i] = best_idx
        s[i] = best
    return assignment, sqdist


def forest_votes(feat, thresh, left, right, leaf, roots, X):
    cdef cnp.int32_t[::1] f = np.ascontiguousarray(feat, dtype=np.int32)
    cdef double[::1] t = np.ascontiguousarray(thresh, dtype=np.float64)
    cdef cnp.int32_t[::1] lc = np.ascontiguousarray(left, dtype=np.int32)
    cdef cnp.int32_t[::1] rc = np.ascontiguousarray(right, dtype=np.int32)
    cdef cnp.int8_t[::1] lv = np.ascontiguousarray(leaf, dtype=np.int8)
    cdef cnp.int32_t[::1] rt = np.ascontiguousarray(roots, dtype=np.int32)
    cdef double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)

    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n_trees = rt.shape[0]
    votes = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] v = votes

    cdef Py_ssize_t i, tr
    cdef cnp.int32_t node
    cdef cnp.int64_t acc
    for i in range(n):
        acc = 0
        for tr in range(n_trees):
            node = rt[tr]
            while f[node] >= 0:
                if x[i, f[node]] <= t[node]:
                    node = lc[node]
                else:
                    node = rc[node]
            acc += lv[node]
        v[i] = acc
    return votes

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled union-find kernels. Must stay output-identical to _pykernels."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t idx_t


cdef inline idx_t _find(idx_t[::1] parent, idx_t x) noexcept nogil:
    cdef idx_t root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def lrd_contract(idx_t n, idx_t[::1] eu, idx_t[::1] ev, double[::1] score,
                 double[::1] thresholds):
    cdef Py_ssize_t n_levels = thresholds.shape[0]
    cdef Py_ssize_t m = eu.shape[0]
    assignment_np = np.empty((n_levels + 1, n), dtype=np.int64)
    diameter_np = np.zeros((n_levels + 1, n), dtype=np.float64)
    size_np = np.zeros((n_levels + 1, n), dtype=np.int64)
    cdef idx_t[:, ::1] assignment = assignment_np
    cdef double[:, ::1] diameter = diameter_np
    cdef idx_t[:, ::1] size_out = size_np

    parent_np = np.arange(n, dtype=np.int64)
    minid_np = np.arange(n, dtype=np.int64)
    csize_np = np.ones(n, dtype=np.int64)
    cdiam_np = np.zeros(n, dtype=np.float64)
    live_np = np.arange(m, dtype=np.int64)
    cdef idx_t[::1] parent = parent_np
    cdef idx_t[::1] minid = minid_np
    cdef idx_t[::1] csize = csize_np
    cdef double[::1] cdiam = cdiam_np
    cdef idx_t[::1] live = live_np

    cdef Py_ssize_t lev, i, k, n_live = m, kept
    cdef idx_t a, b, r, x, e, n_clusters = n
    cdef double d, merged

    with nogil:
        for x in range(n):
            assignment[0, x] = x
            size_out[0, x] = 1
        for lev in range(n_levels):
            d = thresholds[lev]
            kept = 0
            for k in range(n_live):
                e = live[k]
                a = _find(parent, eu[e])
                b = _find(parent, ev[e])
                if a == b:
                    continue
                merged = cdiam[a] + cdiam[b] + score[e]
                if merged <= d:
                    if csize[a] < csize[b]:
                        a, b = b, a
                    parent[b] = a
                    csize[a] += csize[b]
                    cdiam[a] = merged
                    if minid[b] < minid[a]:
                        minid[a] = minid[b]
                    n_clusters -= 1
                else:
                    live[kept] = e
                    kept += 1
            n_live = kept
            for x in range(n):
                r = _find(parent, x)
                assignment[lev + 1, x] = minid[r]
                if r == x:
                    diameter[lev + 1, minid[r]] = cdiam[r]
                    size_out[lev + 1, minid[r]] = csize[r]
    return assignment_np, diameter_np, size_np


def kruskal(idx_t n, idx_t[::1] eu, idx_t[::1] ev):
    """Greedy forest over edges in the given order; returns the selection mask."""
    cdef Py_ssize_t m = eu.shape[0], k
    parent_np = np.arange(n, dtype=np.int64)
    rank_np = np.zeros(n, dtype=np.int64)
    mask_np = np.zeros(m, dtype=np.uint8)
    cdef idx_t[::1] parent = parent_np
    cdef idx_t[::1] rank = rank_np
    cdef cnp.uint8_t[::1] mask = mask_np
    cdef idx_t a, b, taken = 0
    with nogil:
        for k in range(m):
            a = _find(parent, eu[k])
            b = _find(parent, ev[k])
            if a == b:
                continue
            if rank[a] < rank[b]:
                a, b = b, a
            parent[b] = a
            if rank[a] == rank[b]:
                rank[a] += 1
            mask[k] = 1
            taken += 1
            if taken == n - 1:
                break
    return mask_np.astype(bool)

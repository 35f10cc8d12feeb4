"""Pure-Python versions of the compiled kernels in ``_ckernels.pyx``."""

import numpy as np


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def lrd_contract(n, eu, ev, score, thresholds):
    """Level-by-level greedy contraction of pre-sorted edges.

    At each level an edge joins its endpoint clusters when the summed
    diameter bound fits under that level's threshold.  Cluster labels are
    the smallest contained node id; diameter and size rows are indexed by
    label.
    """
    n = int(n)
    n_levels = len(thresholds)
    eu = eu.tolist()
    ev = ev.tolist()
    score = score.tolist()
    assignment = np.empty((n_levels + 1, n), dtype=np.int64)
    diameter = np.zeros((n_levels + 1, n))
    size_out = np.zeros((n_levels + 1, n), dtype=np.int64)
    assignment[0] = np.arange(n)
    size_out[0] = 1

    parent = list(range(n))
    minid = list(range(n))
    csize = [1] * n
    cdiam = [0.0] * n
    live = list(range(len(eu)))
    for lev, d in enumerate(thresholds.tolist(), start=1):
        kept = []
        for e in live:
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
            else:
                kept.append(e)
        live = kept
        roots = [_find(parent, x) for x in range(n)]
        row = assignment[lev]
        for x, r in enumerate(roots):
            row[x] = minid[r]
            if r == x:
                diameter[lev, minid[r]] = cdiam[r]
                size_out[lev, minid[r]] = csize[r]
    return assignment, diameter, size_out


def kruskal(n, eu, ev):
    n = int(n)
    parent = list(range(n))
    rank = [0] * n
    mask = np.zeros(len(eu), dtype=bool)
    taken = 0
    for k, (a, b) in enumerate(zip(eu.tolist(), ev.tolist())):
        a = _find(parent, a)
        b = _find(parent, b)
        if a == b:
            continue
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
        mask[k] = True
        taken += 1
        if taken == n - 1:
            break
    return mask

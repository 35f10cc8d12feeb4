"""Synthetic graph families used by tests and benchmarks."""

import numpy as np
from scipy.spatial import Delaunay

from .graph import WeightedGraph


def _weights(rng, m, weights):
    if weights == "unit":
        return np.ones(m)
    if weights == "uniform":
        return rng.uniform(0.5, 2.0, m)
    if weights == "loguniform":
        return 10.0 ** rng.uniform(-1.0, 1.0, m)
    raise ValueError(f"unknown weight model {weights!r}")


def path_graph(n, w=1.0):
    idx = np.arange(n - 1)
    return WeightedGraph(n, idx, idx + 1, np.full(n - 1, float(w)))


def complete_graph(n, w=1.0):
    u, v = np.triu_indices(n, 1)
    return WeightedGraph(n, u, v, np.full(len(u), float(w)))


def star_graph(n_leaves, w=1.0):
    leaves = np.arange(1, n_leaves + 1)
    return WeightedGraph(n_leaves + 1, np.zeros(n_leaves, dtype=np.int64), leaves,
                         np.full(n_leaves, float(w)))


def random_connected_graph(n, avg_degree=6.0, seed=0, weights="unit"):
    """Random recursive tree plus uniformly random extra edges.

    The edge count is ``round(n * avg_degree / 2)`` (capped by the complete
    graph); the tree guarantees connectivity.
    """
    rng = np.random.default_rng(seed)
    target = min(int(round(n * avg_degree / 2)), n * (n - 1) // 2)
    child = np.arange(1, n)
    parent = (rng.random(n - 1) * child).astype(np.int64)
    keys = set((parent * n + child).tolist())
    while len(keys) < target:
        need = target - len(keys)
        a = rng.integers(0, n, 2 * need + 8)
        b = rng.integers(0, n, 2 * need + 8)
        for x, y in zip(a.tolist(), b.tolist()):
            if x == y:
                continue
            k = min(x, y) * n + max(x, y)
            if k not in keys:
                keys.add(k)
                if len(keys) == target:
                    break
    keys = np.array(sorted(keys), dtype=np.int64)
    return WeightedGraph(n, keys // n, keys % n, _weights(rng, len(keys), weights))


def torus_grid(rows, cols, seed=0, weights="unit"):
    """4-regular periodic grid."""
    rng = np.random.default_rng(seed)
    idx = np.arange(rows * cols).reshape(rows, cols)
    right = np.roll(idx, -1, axis=1)
    down = np.roll(idx, -1, axis=0)
    u = np.concatenate([idx.ravel(), idx.ravel()])
    v = np.concatenate([right.ravel(), down.ravel()])
    return WeightedGraph(rows * cols, u, v, _weights(rng, len(u), weights))


def regular_graph(n, seed=0, weights="unit"):
    """Square-ish 4-regular torus with ``n`` nodes (``n`` a power of four
    gives an exact square)."""
    rows = 1 << (int(np.log2(n)) // 2)
    return torus_grid(rows, n // rows, seed=seed, weights=weights)


def delaunay_mesh(n, seed=0, weights="unit"):
    """Delaunay triangulation of ``n`` random points in the unit square.

    A 2-D finite-element-like mesh with about ``3n`` edges; nodes are
    numbered along horizontal strips so nearby nodes get nearby ids.
    """
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    strips = max(1, int(np.sqrt(n)))
    order = np.lexsort((pts[:, 0], np.floor(pts[:, 1] * strips)))
    pts = pts[order]
    tri = Delaunay(pts).simplices
    u = np.concatenate([tri[:, 0], tri[:, 1], tri[:, 2]])
    v = np.concatenate([tri[:, 1], tri[:, 2], tri[:, 0]])
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    keys = np.unique(lo.astype(np.int64) * n + hi)
    return WeightedGraph(n, keys // n, keys % n, _weights(rng, len(keys), weights))

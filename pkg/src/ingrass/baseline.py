"""Initial-sparsifier generator and the random-inclusion comparator."""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import breadth_first_order, shortest_path
from scipy.sparse.linalg import splu

from . import kernels
from .errors import DensityTooLow, NotConnected
from .graph import WeightedGraph
from .resistance import estimate_resistances

STRATEGIES = ("spanning-tree-plus-distortion", "random")


@dataclass(frozen=True)
class SparsifierConfig:
    target_density: float  # edges per node, |E_H| / |V|
    seed: int = 0
    strategy: str = "spanning-tree-plus-distortion"
    rounds: int = 0  # >0: pick off-tree edges over several refinement rounds
    probe_vectors: int = 8
    probe_steps: int = 2

    @classmethod
    def from_offtree(cls, fraction, n_nodes, **kw):
        """Config for a spanning tree plus ``fraction * n`` extra edges."""
        return cls(((n_nodes - 1) + fraction * n_nodes) / n_nodes, **kw)

    def target_edges(self, n_nodes):
        return int(round(self.target_density * n_nodes))


def _center(g):
    """Approximate graph center: midpoint of a double-sweep BFS diameter path."""
    A = g.adjacency
    d0 = shortest_path(A, unweighted=True, indices=0)
    a = int(np.argmax(d0))
    da = shortest_path(A, unweighted=True, indices=a)
    b = int(np.argmax(da))
    db = shortest_path(A, unweighted=True, indices=b)
    return int(np.argmin(np.maximum(da, db)))


def max_spanning_tree(g, root=None):
    """Mask over ``g``'s edges of a maximum-weight spanning tree.

    Equal weights are broken by BFS depth from ``root`` (default: an
    approximate center), then by ``(u, v)``.  On unit weights this yields a
    breadth-first tree, whose stretch is far lower than that of an id-ordered
    tree.
    """
    if root is None:
        root = _center(g) if g.n_nodes > 1 else 0
    depth = shortest_path(g.adjacency, unweighted=True, indices=root)
    depth = np.where(np.isfinite(depth), depth, g.n_nodes).astype(np.int64)
    du, dv = depth[g.u], depth[g.v]
    order = np.lexsort((g.v, g.u, np.maximum(du, dv), np.minimum(du, dv), -g.w))
    picked = kernels.kruskal(g.n_nodes, g.u[order], g.v[order])
    mask = np.zeros(g.n_edges, dtype=bool)
    mask[order[picked]] = True
    return mask


def tree_resistances(tree, ps, qs):
    """Exact resistances between node pairs of a spanning tree (path sums of 1/w).

    Uses root distances and binary-lifted lowest common ancestors.
    """
    n = tree.n_nodes
    order, pred = breadth_first_order(tree.adjacency, 0, directed=False)
    if len(order) != n:
        raise NotConnected("tree does not span the graph")
    pred = pred.astype(np.int64)
    pred[0] = 0
    A = tree.adjacency
    rdist = np.zeros(n)
    depth = np.zeros(n, dtype=np.int64)
    child = order[1:]
    # resistance of the edge to each node's parent
    wpar = np.asarray(A[child, pred[child]]).ravel()
    for x, r in zip(child.tolist(), (1.0 / wpar).tolist()):
        p = pred[x]
        rdist[x] = rdist[p] + r
        depth[x] = depth[p] + 1
    up = [pred]
    for _ in range(max(1, int(depth.max()).bit_length())):
        up.append(up[-1][up[-1]])
    a = np.asarray(ps, dtype=np.int64).copy()
    b = np.asarray(qs, dtype=np.int64).copy()
    swap = depth[a] < depth[b]
    a[swap], b[swap] = b[swap], a[swap].copy()
    diff = depth[a] - depth[b]
    for k in range(len(up)):
        bit = (diff >> k) & 1 == 1
        a[bit] = up[k][a[bit]]
    for k in range(len(up) - 1, -1, -1):
        mv = (up[k][a] != up[k][b])
        a[mv] = up[k][a[mv]]
        b[mv] = up[k][b[mv]]
    lca = np.where(a == b, a, pred[a])
    return rdist[np.asarray(ps)] + rdist[np.asarray(qs)] - 2 * rdist[lca]


def _refine(g, mask, extra, rounds, nvec, steps, seed):
    """Add ``extra`` off-tree edges over ``rounds`` rounds of largest heat.

    Each round probes ``L_H^-1 L_G`` with a few random vectors and scores an
    off-tree edge by ``w * (x_u - x_v)^2`` summed over the probes, which is
    large for edges whose endpoints ``H`` still holds far apart.
    """
    n = g.n_nodes
    rng = np.random.default_rng(seed)
    LG = g.laplacian()[: n - 1, : n - 1].tocsc()
    for r in range(rounds):
        k = extra * (r + 1) // rounds - extra * r // rounds
        if k == 0:
            continue
        h = WeightedGraph(n, g.u[mask], g.v[mask], g.w[mask])
        lu = splu(h.laplacian()[: n - 1, : n - 1].tocsc())
        X = rng.standard_normal((n - 1, nvec))
        for _ in range(steps):
            X = lu.solve(LG @ X)
            X /= np.linalg.norm(X, axis=0)
        X = np.vstack([X, np.zeros((1, nvec))])  # grounded node
        off = np.flatnonzero(~mask)
        heat = g.w[off] * ((X[g.u[off]] - X[g.v[off]]) ** 2).sum(axis=1)
        mask[off[np.argsort(-heat, kind="stable")[:k]]] = True
    return mask


def baseline_sparsify(g, cfg, emb=None):
    """Spanning tree plus the off-tree edges of largest ``w * R``.

    ``R`` is the exact resistance in the spanning tree unless an embedder
    is given, in which case its Krylov estimates are used.  With the
    ``random`` strategy the off-tree edges are drawn uniformly instead.
    With ``cfg.rounds > 0`` the off-tree edges are added in that many rounds,
    each scored against the sparsifier built so far (see :func:`_refine`).
    """
    if cfg.strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {cfg.strategy!r}")
    n = g.n_nodes
    if not g.is_connected():
        raise NotConnected("input graph must be connected")
    if cfg.target_density < (n - 1) / n - 1e-12:
        raise DensityTooLow(f"density {cfg.target_density} below spanning-tree density {(n - 1) / n}")
    mask = max_spanning_tree(g)
    extra = max(0, cfg.target_edges(n) - (n - 1))
    off = np.flatnonzero(~mask)
    if extra >= len(off):
        return g
    if cfg.strategy == "random":
        rng = np.random.default_rng(cfg.seed)
        mask[rng.choice(off, size=extra, replace=False)] = True
    elif cfg.rounds > 0:
        mask = _refine(g, mask, extra, cfg.rounds, cfg.probe_vectors, cfg.probe_steps, cfg.seed)
    else:
        if emb is None:
            tree = WeightedGraph(n, g.u[mask], g.v[mask], g.w[mask])
            r = tree_resistances(tree, g.u[off], g.v[off])
        else:
            r = estimate_resistances(emb, g.u[off], g.v[off])
        score = g.w[off] * r
        # descending score, ties by (u, v) through the sorted edge order
        mask[off[np.argsort(-score, kind="stable")[:extra]]] = True
    return WeightedGraph(n, g.u[mask], g.v[mask], g.w[mask])


def random_include(h, batch, fraction, seed=0):
    """Add a uniformly random ``fraction`` of ``batch`` to ``h``.

    The subset is a prefix of one seeded permutation, so larger fractions
    under the same seed include every edge chosen by smaller ones.
    Parallel edges are merged by summing weights.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    batch = list(batch)
    k = int(round(fraction * len(batch)))
    if k == 0:
        return h
    perm = np.random.default_rng(seed).permutation(len(batch))[:k]
    arr = np.asarray(batch, dtype=np.float64).reshape(-1, 3)[np.sort(perm)]
    add = WeightedGraph(h.n_nodes, arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2])
    return h.union(add)

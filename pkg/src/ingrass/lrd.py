"""Multilevel low-resistance-diameter decomposition and the cluster-pair index.

Clusters are grown by union-find contraction over the sparsifier's edges in
ascending order of estimated resistance.  A merge of clusters ``a`` and ``b``
through edge ``e`` is accepted at level ``l`` when
``diam(a) + diam(b) + R(e) <= d_l``, and the sum becomes the new diameter
bound.  Thresholds grow geometrically from the median edge estimate.  Every
cluster is labelled by its smallest node id, so the labels double as node ids
and a node's embedding vector is its column of ``assignment``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmbedderMismatch, NotConnected, OutOfRange, SameNode
from .resistance import estimate_resistances

MAX_LEVELS = 40


@dataclass(eq=False)
class LrdHierarchy:
    assignment: np.ndarray  # (L+1, n); row 0 is the identity partition
    diameter: np.ndarray  # (L+1, n) indexed by cluster label
    cluster_size: np.ndarray  # (L+1, n) indexed by cluster label, 0 if unused
    threshold: np.ndarray  # (L+1,); threshold[0] == 0
    growth: float

    @property
    def levels(self):
        return self.assignment.shape[0] - 1

    @property
    def n_nodes(self):
        return self.assignment.shape[1]

    @property
    def fallback_bound(self):
        """Bound used for pairs that never share a cluster."""
        return float(self.threshold[-1] * self.growth)

    def max_cluster_sizes(self):
        """Largest cluster size for every level 0..L."""
        return self.cluster_size.max(axis=1)

    def n_clusters(self, level):
        return int(np.count_nonzero(self.cluster_size[level]))

    def clusters(self, level):
        """Dict label -> sorted member array at ``level`` (for inspection)."""
        row = self.assignment[level]
        order = np.argsort(row, kind="stable")
        labels, starts = np.unique(row[order], return_index=True)
        parts = np.split(order, starts[1:])
        return dict(zip(labels.tolist(), parts))

    def __eq__(self, other):
        if not isinstance(other, LrdHierarchy):
            return NotImplemented
        return (
            self.growth == other.growth
            and np.array_equal(self.assignment, other.assignment)
            and np.array_equal(self.diameter, other.diameter)
            and np.array_equal(self.cluster_size, other.cluster_size)
            and np.array_equal(self.threshold, other.threshold)
        )


def default_levels(n):
    return int(min(MAX_LEVELS, max(2, math.ceil(math.log2(max(n, 2))))))


def lrd_decompose(h0, emb=None, levels=None, growth=2.0, *, edge_resistance=None,
                  base_threshold=None, backend=None):
    """Build the multilevel hierarchy of ``h0``.

    Edge scores come from ``emb`` unless ``edge_resistance`` (one value per
    edge of ``h0``, in ``h0`` edge order) is given, which is how exact
    resistances are substituted in tests.  ``base_threshold`` overrides the
    median-based first threshold.
    """
    n = h0.n_nodes
    if not h0.is_connected():
        raise NotConnected("sparsifier must be connected")
    if levels is None:
        levels = default_levels(n)
    if levels < 2:
        raise ValueError("levels must be >= 2")
    if growth <= 1.0:
        raise ValueError("growth must exceed 1")

    if edge_resistance is None:
        if emb is None:
            raise ValueError("need an embedder or explicit edge resistances")
        if emb.n_nodes != n:
            raise EmbedderMismatch(f"embedder has {emb.n_nodes} nodes, graph has {n}")
        scores = estimate_resistances(emb, h0.u, h0.v)
    else:
        scores = np.asarray(edge_resistance, dtype=np.float64)
        if scores.shape != (h0.n_edges,):
            raise EmbedderMismatch("edge_resistance must have one entry per edge")

    if base_threshold is None:
        base = float(np.median(scores)) if len(scores) else 1.0
        if base <= 0.0:
            pos = scores[scores > 0]
            base = float(pos.min()) if len(pos) else 1.0
    else:
        base = float(base_threshold)
    thresholds = base * float(growth) ** np.arange(levels)

    # h0 edges are sorted by (u, v), so a stable sort breaks score ties by ids
    order = np.argsort(scores, kind="stable")
    assignment, diameter, size = kernels.lrd_contract(
        n, h0.u[order], h0.v[order], scores[order], thresholds, backend=backend)
    return LrdHierarchy(assignment, diameter, size,
                        np.concatenate([[0.0], thresholds]), float(growth))


def embedding_vector(h, u, include_level0=False):
    """Cluster labels of node ``u`` for levels 1..L (0..L with ``include_level0``)."""
    if not 0 <= u < h.n_nodes:
        raise OutOfRange(f"node {u} outside [0, {h.n_nodes})")
    col = h.assignment[:, u]
    return col.copy() if include_level0 else col[1:].copy()


def shared_level(h, p, q):
    """Lowest level at which ``p`` and ``q`` share a cluster, or ``None``."""
    same = h.assignment[:, p] == h.assignment[:, q]
    lev = int(np.argmax(same))
    return lev if same[lev] else None


def resistance_upper_bound(h, p, q):
    """Diameter of the lowest cluster containing both nodes."""
    if p == q:
        raise SameNode(f"p == q == {p}")
    n = h.n_nodes
    if not (0 <= p < n and 0 <= q < n):
        raise OutOfRange(f"node ids ({p}, {q}) outside [0, {n})")
    lev = shared_level(h, p, q)
    if lev is None:
        return h.fallback_bound
    return float(h.diameter[lev, h.assignment[lev, p]])


class ClusterPairIndex:
    """Per-level map from unordered cluster pairs to the sparsifier edges
    crossing them, plus per-cluster lists of internal edges.

    The bulk built by :func:`build_pair_index` lives in sorted arrays; edges
    registered later go to per-level dict overlays.  Edge references are
    positions in the owner's edge list.
    """

    def __init__(self, n_nodes, cross_keys, cross_edges, intra_keys, intra_edges):
        self.n_nodes = int(n_nodes)
        self._ck = list(cross_keys)
        self._ce = list(cross_edges)
        self._ik = list(intra_keys)
        self._ie = list(intra_edges)
        self._cx = [dict() for _ in self._ck]
        self._ix = [dict() for _ in self._ik]

    @property
    def levels(self):
        return len(self._ck)

    def pair_key(self, a, b):
        return a * self.n_nodes + b if a < b else b * self.n_nodes + a

    @staticmethod
    def _lookup(keys, vals, key):
        lo = int(np.searchsorted(keys, key, "left"))
        if lo == len(keys) or keys[lo] != key:
            return []
        hi = int(np.searchsorted(keys, key, "right"))
        return vals[lo:hi].tolist()

    def cross(self, level, a, b):
        """Edges crossing clusters ``a`` and ``b`` at ``level`` (1-based)."""
        key = self.pair_key(a, b)
        i = level - 1
        found = self._lookup(self._ck[i], self._ce[i], key)
        extra = self._cx[i].get(key)
        return found + extra if extra else found

    def has_cross(self, level, a, b):
        key = self.pair_key(a, b)
        i = level - 1
        if key in self._cx[i]:
            return True
        keys = self._ck[i]
        pos = int(np.searchsorted(keys, key))
        return pos < len(keys) and keys[pos] == key

    def intra(self, level, c):
        """Edges with both endpoints inside cluster ``c`` at ``level``."""
        i = level - 1
        found = self._lookup(self._ik[i], self._ie[i], c)
        extra = self._ix[i].get(c)
        return found + extra if extra else found

    def register(self, eid, u, v, hierarchy):
        """Add edge ``eid = (u, v)`` at every level."""
        asg = hierarchy.assignment
        for i in range(self.levels):
            a = int(asg[i + 1, u])
            b = int(asg[i + 1, v])
            if a == b:
                self._ix[i].setdefault(a, []).append(eid)
            else:
                self._cx[i].setdefault(self.pair_key(a, b), []).append(eid)

    def level_counts(self, level):
        """``(cross entries, intra entries)`` at ``level``."""
        i = level - 1
        nc = len(self._ce[i]) + sum(len(x) for x in self._cx[i].values())
        ni = len(self._ie[i]) + sum(len(x) for x in self._ix[i].values())
        return nc, ni

    def to_arrays(self):
        """Canonical per-level arrays with overlays folded in."""
        out = []
        for i in range(self.levels):
            ck, ce = _fold(self._ck[i], self._ce[i], self._cx[i])
            ik, ie = _fold(self._ik[i], self._ie[i], self._ix[i])
            out.append((ck, ce, ik, ie))
        return out

    @classmethod
    def from_arrays(cls, n_nodes, arrays):
        ck, ce, ik, ie = zip(*arrays) if arrays else ((), (), (), ())
        return cls(n_nodes, ck, ce, ik, ie)

    def __eq__(self, other):
        if not isinstance(other, ClusterPairIndex):
            return NotImplemented
        if self.n_nodes != other.n_nodes or self.levels != other.levels:
            return False
        return all(
            all(np.array_equal(x, y) for x, y in zip(a, b))
            for a, b in zip(self.to_arrays(), other.to_arrays())
        )


def _fold(keys, vals, overlay):
    if not overlay:
        return keys, vals
    ok = np.array([k for k, lst in overlay.items() for _ in lst], dtype=np.int64)
    ov = np.array([e for lst in overlay.values() for e in lst], dtype=np.int64)
    k = np.concatenate([keys, ok])
    v = np.concatenate([vals, ov])
    order = np.lexsort((v, k))
    return k[order], v[order]


def build_pair_index(h0, h):
    """Register every edge of ``h0`` at every level of ``h``."""
    n = h0.n_nodes
    eids = np.arange(h0.n_edges, dtype=np.int64)
    ck, ce, ik, ie = [], [], [], []
    for lev in range(1, h.levels + 1):
        a = h.assignment[lev, h0.u]
        b = h.assignment[lev, h0.v]
        cross = a != b
        keys = np.minimum(a[cross], b[cross]) * n + np.maximum(a[cross], b[cross])
        order = np.argsort(keys, kind="stable")
        ck.append(keys[order])
        ce.append(eids[cross][order])
        c = a[~cross]
        order = np.argsort(c, kind="stable")
        ik.append(c[order])
        ie.append(eids[~cross][order])
    return ClusterPairIndex(n, ck, ce, ik, ie)

"""Weighted undirected graphs, Laplacian operators and Matrix Market I/O."""

import gzip
import io
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

from .errors import (
    DimensionMismatch,
    DisconnectedGraph,
    EmptyGraph,
    ParseError,
)

MIN_WEIGHT = 1e-300


def _canonical_edges(n, u, v, w):
    """Orient as u < v, sort by (u, v) and sum parallel entries."""
    u = np.asarray(u, dtype=np.int64).ravel()
    v = np.asarray(v, dtype=np.int64).ravel()
    w = np.asarray(w, dtype=np.float64).ravel()
    if not (len(u) == len(v) == len(w)):
        raise DimensionMismatch("edge arrays differ in length")
    if len(u) == 0:
        return u, v, w
    if u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n:
        raise ValueError("edge endpoint out of range")
    if np.any(u == v):
        raise ValueError("self-loops are not allowed")
    if not np.all(np.isfinite(w)) or np.any(w < MIN_WEIGHT):
        raise ValueError("edge weights must be finite and > 1e-300")
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    key = lo * n + hi
    order = np.argsort(key, kind="stable")
    key = key[order]
    w = w[order]
    uniq, start = np.unique(key, return_index=True)
    if len(uniq) != len(key):
        w = np.add.reduceat(w, start)
    return uniq // n, uniq % n, w


class WeightedGraph:
    """Immutable undirected graph with strictly positive edge weights.

    Edges are stored once, oriented ``u < v`` and sorted by ``(u, v)``.
    Parallel edges passed to the constructor are merged by summing weights.
    The symmetric CSR adjacency is built on first use.
    """

    __slots__ = ("n_nodes", "u", "v", "w", "_adj", "_lap")

    def __init__(self, n_nodes, u, v, w):
        self.n_nodes = int(n_nodes)
        u, v, w = _canonical_edges(self.n_nodes, u, v, w)
        for arr in (u, v, w):
            arr.setflags(write=False)
        self.u, self.v, self.w = u, v, w
        self._adj = None
        self._lap = None

    @classmethod
    def from_edges(cls, n_nodes, edges):
        """Build from an iterable of ``(u, v, w)`` triples."""
        edges = list(edges)
        if not edges:
            return cls(n_nodes, [], [], [])
        u, v, w = zip(*edges)
        return cls(n_nodes, u, v, w)

    @property
    def n_edges(self):
        return len(self.u)

    def edges(self):
        return list(zip(self.u.tolist(), self.v.tolist(), self.w.tolist()))

    @property
    def adjacency(self):
        if self._adj is None:
            n = self.n_nodes
            rows = np.concatenate([self.u, self.v])
            cols = np.concatenate([self.v, self.u])
            data = np.concatenate([self.w, self.w])
            adj = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
            adj.sort_indices()
            self._adj = adj
        return self._adj

    @property
    def indptr(self):
        return self.adjacency.indptr

    @property
    def indices(self):
        return self.adjacency.indices

    @property
    def degrees(self):
        """Weighted degrees."""
        n = self.n_nodes
        return np.bincount(self.u, self.w, n) + np.bincount(self.v, self.w, n)

    def laplacian(self):
        """Sparse CSR Laplacian ``D - A``."""
        if self._lap is None:
            self._lap = (sp.diags(self.degrees) - self.adjacency).tocsr()
        return self._lap

    def dense_laplacian(self):
        n = self.n_nodes
        L = np.zeros((n, n))
        np.add.at(L, (self.u, self.v), -self.w)
        np.add.at(L, (self.v, self.u), -self.w)
        L[np.diag_indices(n)] = self.degrees
        return L

    def edge_index(self):
        """Dict mapping ``(u, v)`` with ``u < v`` to the edge position."""
        return {(a, b): i for i, (a, b) in enumerate(zip(self.u.tolist(), self.v.tolist()))}

    def with_weights(self, w):
        return WeightedGraph(self.n_nodes, self.u, self.v, w)

    def scaled(self, factor):
        return self.with_weights(self.w * factor)

    def union(self, other):
        """Edge-wise union; weights of shared edges are summed."""
        if other.n_nodes != self.n_nodes:
            raise DimensionMismatch("node counts differ")
        return WeightedGraph(
            self.n_nodes,
            np.concatenate([self.u, other.u]),
            np.concatenate([self.v, other.v]),
            np.concatenate([self.w, other.w]),
        )

    def remove_edges(self, pairs):
        """Copy without the given unordered pairs (missing pairs are ignored)."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        n = self.n_nodes
        drop = np.minimum(pairs[:, 0], pairs[:, 1]) * n + np.maximum(pairs[:, 0], pairs[:, 1])
        keep = ~np.isin(self.u * n + self.v, drop)
        return WeightedGraph(n, self.u[keep], self.v[keep], self.w[keep])

    def is_connected(self):
        if self.n_nodes <= 1:
            return True
        k, _ = _cc(self.adjacency, directed=False)
        return k == 1

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n_nodes == other.n_nodes
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )

    __hash__ = None

    def __repr__(self):
        return f"WeightedGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def _check_vec(g, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n_nodes,):
        raise DimensionMismatch(f"expected vector of length {g.n_nodes}, got shape {x.shape}")
    return x


def laplacian_apply(g, x):
    """Return ``(D - A) x`` accumulated edge by edge."""
    x = _check_vec(g, x)
    flow = g.w * (x[g.u] - x[g.v])
    n = g.n_nodes
    return np.bincount(g.u, flow, n) - np.bincount(g.v, flow, n)


def quadratic_form(g, x):
    """``x^T L x`` as a sum over edges of ``w (x_u - x_v)^2``."""
    x = _check_vec(g, x)
    d = x[g.u] - x[g.v]
    return float(np.dot(g.w, d * d))


def component_labels(g):
    """Component label per node, labels ordered by smallest contained node."""
    if g.n_nodes == 0:
        return 0, np.zeros(0, dtype=np.int64)
    k, labels = _cc(g.adjacency, directed=False)
    first = np.full(k, g.n_nodes, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(g.n_nodes))
    remap = np.empty(k, dtype=np.int64)
    remap[np.argsort(first)] = np.arange(k)
    return k, remap[labels]


def connected_components(g):
    """Partition of the nodes into components, sorted by smallest member."""
    k, labels = component_labels(g)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(k + 1))
    return [set(order[bounds[i]:bounds[i + 1]].tolist()) for i in range(k)]


def largest_component(g):
    """Induced subgraph on the largest component, ids compacted in order."""
    k, labels = component_labels(g)
    if k <= 1:
        return g
    sizes = np.bincount(labels)
    keep = labels == np.argmax(sizes)
    newid = np.cumsum(keep) - 1
    m = keep[g.u] & keep[g.v]
    return WeightedGraph(int(keep.sum()), newid[g.u[m]], newid[g.v[m]], g.w[m])


# Matrix Market

def _read_mm(path):
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        raw = fh.read()
    head = raw.lstrip()[:64].lower()
    if not head.startswith(b"%%matrixmarket"):
        raise ParseError(f"{path}: missing %%MatrixMarket header")
    tokens = raw.split(b"\n", 1)[0].lower().split()
    if len(tokens) < 5 or tokens[1] != b"matrix" or tokens[2] != b"coordinate":
        raise ParseError(f"{path}: only 'matrix coordinate' files are supported")
    if tokens[3] not in (b"real", b"integer", b"pattern"):
        raise ParseError(f"{path}: unsupported field {tokens[3].decode()}")
    try:
        mat = scipy.io.mmread(io.BytesIO(raw))
    except Exception as exc:  # scipy raises assorted ValueError/OSError types
        raise ParseError(f"{path}: {exc}") from exc
    return sp.coo_matrix(mat)


def load_matrix_market(path, largest_component_only=False):
    """Read a coordinate Matrix Market file as a :class:`WeightedGraph`.

    Diagonal entries are dropped, duplicate entries of the same ordered
    position are summed by magnitude, the two directions of an off-diagonal
    pair are merged by taking the larger magnitude, and pattern entries get
    weight 1.  Nodes that end up without edges are removed and the remaining
    ids compacted.  ``.gz`` files are decompressed transparently.
    """
    coo = _read_mm(path)
    if coo.shape[0] != coo.shape[1]:
        raise ParseError(f"{path}: matrix is not square {coo.shape}")
    n = coo.shape[0]
    r = coo.row.astype(np.int64)
    c = coo.col.astype(np.int64)
    a = np.abs(coo.data.astype(np.float64))
    off = (r != c) & (a > 0)
    r, c, a = r[off], c[off], a[off]
    if len(r) == 0:
        raise EmptyGraph(f"{path}: no off-diagonal entries")

    # sum duplicates per ordered position, then max over the two directions
    key = r * n + c
    uniq, inv = np.unique(key, return_inverse=True)
    summed = np.bincount(inv, a)
    r, c = uniq // n, uniq % n
    ukey = np.minimum(r, c) * n + np.maximum(r, c)
    upair, pinv = np.unique(ukey, return_inverse=True)
    best = np.zeros(len(upair))
    np.maximum.at(best, pinv, summed)
    lo, hi = upair // n, upair % n

    used = np.zeros(n, dtype=bool)
    used[lo] = True
    used[hi] = True
    newid = np.cumsum(used) - 1
    g = WeightedGraph(int(used.sum()), newid[lo], newid[hi], best)
    k, _ = component_labels(g)
    if k > 1:
        if largest_component_only:
            return largest_component(g)
        raise DisconnectedGraph(k, f"{path}: {k} connected components")
    return g


def write_matrix_market(g, path, comment=None):
    """Write ``g`` as a symmetric real coordinate file (lower triangle, 1-based)."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wt") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        if comment:
            for line in str(comment).splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{g.n_nodes} {g.n_nodes} {g.n_edges}\n")
        rows = g.v + 1
        cols = g.u + 1
        fh.writelines(f"{a} {b} {x!r}\n" for a, b, x in zip(rows.tolist(), cols.tolist(), g.w.tolist()))

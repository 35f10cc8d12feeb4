"""Update phase: distortion estimates and the three-way edge filter."""

import heapq
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    InternalInconsistency,
    InvalidTarget,
    NonPositiveWeight,
    OutOfRange,
    SameNode,
)
from .graph import WeightedGraph
from .lrd import build_pair_index, resistance_upper_bound


class Decision(str, Enum):
    INSERTED = "inserted"
    MERGED = "merged"
    REDISTRIBUTED = "redistributed"


@dataclass
class EdgeEvent:
    u: int
    v: int
    w: float
    distortion_estimate: float
    decision: Decision
    target: int  # new/merged edge id, or the cluster label for redistribution
    level_used: int
    touched: tuple = ()  # edge ids whose weight changed

    def to_dict(self):
        return {
            "u": self.u, "v": self.v, "w": self.w,
            "distortion_estimate": self.distortion_estimate,
            "decision": self.decision.value, "target": self.target,
            "level_used": self.level_used, "touched": list(self.touched),
        }


def choose_filter_level(h, c):
    """Largest level whose biggest cluster has at most ``floor(c/2)`` nodes (>= 1)."""
    if not c >= 2:
        raise InvalidTarget(f"target condition number must be >= 2, got {c}")
    cap = int(c // 2)
    sizes = h.max_cluster_sizes()[1:]
    ok = np.flatnonzero(sizes <= cap)
    return int(ok[-1]) + 1 if len(ok) else 1


@dataclass(eq=False)
class SparsifierState:
    """Mutable sparsifier with its hierarchy and pair index.

    Edge ids are positions in ``eu/ev/ew``; ids of the initial sparsifier
    follow its sorted edge order and inserted edges are appended.  One writer
    at a time.
    """

    n_nodes: int
    eu: list
    ev: list
    ew: list
    hierarchy: object
    index: object
    target_condition: float
    filter_level: int
    redistribute: str = "path"
    _keys: dict = field(default_factory=dict, repr=False)

    @classmethod
    def create(cls, h0, hierarchy, target_condition, index=None, redistribute="path",
               filter_level=None):
        if redistribute not in ("path", "uniform"):
            raise ValueError(f"unknown redistribution rule {redistribute!r}")
        if index is None:
            index = build_pair_index(h0, hierarchy)
        if filter_level is None:
            filter_level = choose_filter_level(hierarchy, target_condition)
        eu, ev = h0.u.tolist(), h0.v.tolist()
        state = cls(h0.n_nodes, eu, ev, h0.w.tolist(), hierarchy, index,
                    float(target_condition), int(filter_level), redistribute)
        state._keys = {(a, b): i for i, (a, b) in enumerate(zip(eu, ev))}
        return state

    @property
    def n_edges(self):
        return len(self.eu)

    def total_weight(self):
        return float(np.sum(self.ew))

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self._keys

    def to_graph(self):
        return WeightedGraph(self.n_nodes, self.eu, self.ev, self.ew)

    def _insert(self, u, v, w):
        a, b = (u, v) if u < v else (v, u)
        if (a, b) in self._keys:
            raise InternalInconsistency(f"edge ({a}, {b}) already in the sparsifier")
        eid = len(self.eu)
        self.eu.append(a)
        self.ev.append(b)
        self.ew.append(float(w))
        self._keys[(a, b)] = eid
        self.index.register(eid, a, b, self.hierarchy)
        return eid


def _check(s, u, v, w):
    if not (0 <= u < s.n_nodes and 0 <= v < s.n_nodes):
        raise OutOfRange(f"node ids ({u}, {v}) outside [0, {s.n_nodes})")
    if u == v:
        raise SameNode(f"u == v == {u}")
    if not w > 0:
        raise NonPositiveWeight(f"edge weight must be positive, got {w}")


def estimate_distortion(s, u, v, w):
    """``w`` times the hierarchy's resistance bound between ``u`` and ``v``."""
    if u == v:
        raise SameNode(f"u == v == {u}")
    return w * resistance_upper_bound(s.hierarchy, u, v)


def _intra_path(s, level, cluster, src, dst):
    """Edge ids of the shortest ``src``-``dst`` path inside ``cluster`` (lengths 1/w)."""
    adj = {}
    ew = s.ew
    for e in s.index.intra(level, cluster):
        a, b = s.eu[e], s.ev[e]
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    dist = {src: 0.0}
    prev = {}
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        if x == dst:
            break
        done.add(x)
        for y, e in adj.get(x, ()):
            nd = d + 1.0 / ew[e]
            if nd < dist.get(y, np.inf):
                dist[y] = nd
                prev[y] = e
                heapq.heappush(heap, (nd, y))
    if dst not in prev:
        raise InternalInconsistency(
            f"no path between {src} and {dst} inside cluster {cluster} at level {level}")
    path = []
    x = dst
    while x != src:
        e = prev[x]
        path.append(e)
        x = s.eu[e] if s.ev[e] == x else s.ev[e]
    path.reverse()
    return path


def _apply(s, u, v, w, distortion):
    lev = s.filter_level
    asg = s.hierarchy.assignment
    a = int(asg[lev, u])
    b = int(asg[lev, v])
    if a != b:
        cands = s.index.cross(lev, a, b)
        if not cands:
            eid = s._insert(u, v, w)
            return EdgeEvent(u, v, w, distortion, Decision.INSERTED, eid, lev, (eid,))
        tgt = min(cands, key=lambda e: (-s.ew[e], s.eu[e], s.ev[e]))
        s.ew[tgt] += w
        return EdgeEvent(u, v, w, distortion, Decision.MERGED, tgt, lev, (tgt,))

    if s.redistribute == "uniform":
        edges = s.index.intra(lev, a)
        if not edges:
            raise InternalInconsistency(f"cluster {a} at level {lev} has no internal edges")
        share = w / len(edges)
        for e in edges:
            s.ew[e] += share
        return EdgeEvent(u, v, w, distortion, Decision.REDISTRIBUTED, a, lev, tuple(edges))

    path = _intra_path(s, lev, a, u, v)
    res = [1.0 / s.ew[e] for e in path]
    total = sum(res)
    for e, r in zip(path, res):
        s.ew[e] += w * r / total
    return EdgeEvent(u, v, w, distortion, Decision.REDISTRIBUTED, a, lev, tuple(path))


def process_edge(s, u, v, w):
    """Filter one new edge against the sparsifier at the filtering level.

    Crossing an unconnected cluster pair inserts the edge; crossing a
    connected pair adds ``w`` to the heaviest existing crossing edge; an
    edge inside one cluster spreads ``w`` over the shortest internal path in
    proportion to each path edge's resistance.
    """
    u, v, w = int(u), int(v), float(w)
    _check(s, u, v, w)
    return _apply(s, u, v, w, estimate_distortion(s, u, v, w))


def ingrass_update(s, batch):
    """Process a batch in descending estimated distortion; returns events in order."""
    if not batch:
        raise ValueError("empty batch")
    items = []
    for u, v, w in batch:
        u, v, w = int(u), int(v), float(w)
        _check(s, u, v, w)
        items.append((estimate_distortion(s, u, v, w), u, v, w))
    items.sort(key=lambda t: (-t[0], -t[3], min(t[1], t[2]), max(t[1], t[2])))
    return [_apply(s, u, v, w, dist) for dist, u, v, w in items]

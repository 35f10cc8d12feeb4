"""Edge-stream files and synthetic stream generation.

A stream file holds one ``u v w`` triple per line (0-based ids), with
batches separated by a line containing only ``#``.
"""

import numpy as np
import scipy.sparse as sp

from .errors import NotEnoughCandidates, ParseError
from .graph import WeightedGraph

MODES = ("complement", "nonedge", "local")


def read_stream(path):
    """List of batches, each a list of ``(u, v, w)`` tuples."""
    batches, cur = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s == "#":
                batches.append(cur)
                cur = []
                continue
            parts = s.split()
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected 'u v w', got {s!r}")
            try:
                item = (int(parts[0]), int(parts[1]), float(parts[2]))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            cur.append(item)
    if cur:
        batches.append(cur)
    return [b for b in batches if b]


def write_stream(path, batches):
    with open(path, "w") as fh:
        for i, batch in enumerate(batches):
            if i:
                fh.write("#\n")
            for u, v, w in batch:
                fh.write(f"{int(u)} {int(v)} {float(w)!r}\n")


def _complement(g, h0):
    keys_g = g.u.astype(np.int64) * g.n_nodes + g.v
    keys_h = h0.u.astype(np.int64) * g.n_nodes + h0.v
    return np.flatnonzero(~np.isin(keys_g, keys_h))


def _local_pairs(g, hops):
    """Unordered non-adjacent pairs within ``hops`` BFS steps, as key array."""
    A = g.adjacency.copy()
    A.data[:] = 1.0
    reach = A.copy()
    step = A
    for _ in range(hops - 1):
        step = step @ A
        step.data[:] = 1.0
        reach = reach + step
    reach = sp.triu(reach, 1).tocoo()
    keys = reach.row.astype(np.int64) * g.n_nodes + reach.col
    adj = g.u.astype(np.int64) * g.n_nodes + g.v
    return np.setdiff1d(keys, adj)


def synth_stream(g, h0, iterations, edges_per_iter, seed=0, mode="complement",
                 hops=3, weight=1.0):
    """Random batches of new edges.

    ``complement`` samples edges of ``g`` missing from ``h0`` (with their
    ``g`` weights); ``nonedge`` samples uniformly random node pairs that are
    not edges of ``g``; ``local`` samples non-edges within ``hops`` BFS steps.
    The last two carry weight ``weight`` and grow ``g``.  Sampling is
    without replacement and deterministic under ``seed``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if edges_per_iter < 1:
        raise ValueError("edges_per_iter must be >= 1")
    if mode not in MODES:
        raise ValueError(f"unknown stream mode {mode!r}")
    total = iterations * edges_per_iter
    rng = np.random.default_rng(seed)
    n = g.n_nodes
    if mode == "complement":
        cand = _complement(g, h0)
        if len(cand) < total:
            raise NotEnoughCandidates(f"need {total} edges, only {len(cand)} in E_G minus E_H")
        pick = cand[rng.choice(len(cand), total, replace=False)]
        us, vs, ws = g.u[pick], g.v[pick], g.w[pick]
    elif mode == "local":
        cand = _local_pairs(g, hops)
        if len(cand) < total:
            raise NotEnoughCandidates(f"need {total} edges, only {len(cand)} local non-edges")
        pick = cand[rng.choice(len(cand), total, replace=False)]
        us, vs, ws = pick // n, pick % n, np.full(total, float(weight))
    else:
        if n * (n - 1) // 2 - g.n_edges < total:
            raise NotEnoughCandidates(f"need {total} non-edges")
        taken = set((g.u.astype(np.int64) * n + g.v).tolist())
        keys = []
        seen = set()
        while len(keys) < total:
            a = rng.integers(0, n, 2 * total)
            b = rng.integers(0, n, 2 * total)
            for x, y in zip(a.tolist(), b.tolist()):
                k = min(x, y) * n + max(x, y)
                if x == y or k in taken or k in seen:
                    continue
                seen.add(k)
                keys.append(k)
                if len(keys) == total:
                    break
        keys = np.array(keys, dtype=np.int64)
        us, vs, ws = keys // n, keys % n, np.full(total, float(weight))
    triples = list(zip(us.tolist(), vs.tolist(), ws.tolist()))
    return [triples[i * edges_per_iter:(i + 1) * edges_per_iter] for i in range(iterations)]


def grown_graph(g, batches):
    """``g`` with every stream edge added (parallel weights summed)."""
    flat = [e for b in batches for e in b]
    if not flat:
        return g
    arr = np.asarray(flat, dtype=np.float64)
    add = WeightedGraph(g.n_nodes, arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2])
    return g.union(add)

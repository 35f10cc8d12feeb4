"""Effective-resistance estimation from a Krylov subspace, plus a dense oracle."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSubspace, OutOfRange, SameNode, TooLarge
from .graph import laplacian_apply

DROP_TOL = 1e-10
MIN_DEGREE = 1e-300  # isolated nodes only occur in disconnected inputs
EXACT_CAP = 2000


@dataclass(frozen=True, eq=False)
class ResistanceEmbedder:
    """Orthonormal Krylov vectors (stored row-wise, one row per node) and
    their Laplacian Rayleigh quotients.

    ``coords`` is ``vectors / sqrt(rayleigh)`` so an estimate is a squared
    Euclidean distance between two rows.
    """

    vectors: np.ndarray  # (n, k)
    rayleigh: np.ndarray  # (k,)
    m: int
    seed: int
    smoothed: bool = True
    ritz: bool = False
    coords: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        coords = np.ascontiguousarray(self.vectors / np.sqrt(self.rayleigh))
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def n_nodes(self):
        return self.vectors.shape[0]

    @property
    def k(self):
        return self.vectors.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ResistanceEmbedder):
            return NotImplemented
        return (
            self.m == other.m
            and self.seed == other.seed
            and self.smoothed == other.smoothed
            and self.ritz == other.ritz
            and np.array_equal(self.vectors, other.vectors)
            and np.array_equal(self.rayleigh, other.rayleigh)
        )


def build_embedder(g, m=8, seed=0, smoothed=True, ritz=False):
    """Orthonormalised power sequence ``x, Sx, ..., S^(m-1) x``.

    ``S`` is the adjacency matrix when ``smoothed`` is false and
    ``(I + D^-1 A)/2`` otherwise.  The all-ones direction is projected out of
    every vector before modified Gram-Schmidt; vectors whose remaining norm
    falls under 1e-10 of their input norm are dropped, and the sequence then
    restarts from a fresh random vector until ``m`` vectors (or ``n - 1``)
    are collected.  With ``ritz`` the
    basis is rotated onto the Ritz vectors of ``L`` in the subspace.
    """
    if m < 2:
        raise ValueError("Krylov order m must be >= 2")
    n = g.n_nodes
    if n < 2:
        raise DegenerateSubspace("graph needs at least two nodes")
    A = g.adjacency
    deg = np.maximum(g.degrees, MIN_DEGREE)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x -= x.mean()

    basis = []
    cur = x
    fresh = True
    for _ in range(2 * m):  # m steps unless the sequence stalls
        if len(basis) >= min(m, n - 1):
            break
        if not fresh:
            nxt = A @ cur
            if smoothed:
                nxt = 0.5 * (cur + nxt / deg)
            cur = nxt
        fresh = False
        nrm = np.linalg.norm(cur)
        if nrm == 0.0 or not np.isfinite(nrm):
            break
        cur = cur / nrm
        vec = cur - cur.mean()
        for q in basis:
            vec -= np.dot(q, vec) * q
        vn = np.linalg.norm(vec)
        if vn < DROP_TOL:
            # invariant subspace reached (complete graphs, for one): restart
            cur = rng.standard_normal(n)
            cur -= cur.mean()
            fresh = True
            continue
        basis.append(vec / vn)

    # two-node graphs only have one non-constant direction
    need = min(2, n - 1)
    if len(basis) < need:
        raise DegenerateSubspace(f"only {len(basis)} Krylov vectors survived; retry with another seed")
    Q = np.column_stack(basis)
    LQ = np.column_stack([laplacian_apply(g, Q[:, i]) for i in range(Q.shape[1])])
    if ritz:
        theta, V = np.linalg.eigh(Q.T @ LQ)
        Q = Q @ V
        LQ = LQ @ V
    rayleigh = np.einsum("ij,ij->j", Q, LQ)
    keep = rayleigh > 0
    Q, rayleigh = Q[:, keep], rayleigh[keep]
    if Q.shape[1] < need:
        raise DegenerateSubspace("Krylov vectors have zero Laplacian energy")
    Q.setflags(write=False)
    rayleigh.setflags(write=False)
    return ResistanceEmbedder(Q, rayleigh, int(m), seed, smoothed, ritz)


def estimate_resistance(emb, p, q):
    """Krylov estimate ``sum_i (u_i[p] - u_i[q])^2 / rayleigh_i``."""
    n = emb.n_nodes
    if not (0 <= p < n and 0 <= q < n):
        raise OutOfRange(f"node ids ({p}, {q}) outside [0, {n})")
    if p == q:
        raise SameNode(f"p == q == {p}")
    d = emb.coords[p] - emb.coords[q]
    return float(np.dot(d, d))


def estimate_resistances(emb, ps, qs):
    """Vectorised :func:`estimate_resistance` over index arrays."""
    d = emb.coords[np.asarray(ps)] - emb.coords[np.asarray(qs)]
    return np.einsum("ij,ij->i", d, d)


def laplacian_pinv(g, cap=EXACT_CAP):
    if g.n_nodes > cap:
        raise TooLarge(f"dense oracle limited to {cap} nodes, got {g.n_nodes}")
    return np.linalg.pinv(g.dense_laplacian(), hermitian=True)


def exact_resistance(g, p, q, cap=EXACT_CAP):
    """``b_pq^T L^+ b_pq`` from a dense pseudoinverse (test oracle)."""
    if p == q:
        raise SameNode(f"p == q == {p}")
    if not (0 <= p < g.n_nodes and 0 <= q < g.n_nodes):
        raise OutOfRange(f"node ids ({p}, {q}) outside [0, {g.n_nodes})")
    P = laplacian_pinv(g, cap)
    return float(P[p, p] + P[q, q] - 2 * P[p, q])


def exact_resistances(g, ps, qs, cap=EXACT_CAP, pinv=None):
    """Batch oracle; pass ``pinv`` to reuse a pseudoinverse."""
    P = laplacian_pinv(g, cap) if pinv is None else pinv
    ps = np.asarray(ps)
    qs = np.asarray(qs)
    return P[ps, ps] + P[qs, qs] - 2 * P[ps, qs]

"""Spectral similarity between a graph and its sparsifier.

Both Laplacians are singular along the all-ones vector.  The pencil is
restricted to the complement by grounding the last node: dropping one row
and column is a change of basis on the quotient space modulo constants, so
the generalized eigenvalues are the same ones and the grounded matrices are
positive definite.
"""

from dataclasses import asdict, dataclass
import warnings

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import cg, eigsh, LinearOperator, splu

from .errors import BadK, NoConvergence, NodeSetMismatch, SolverFailure, TooLarge
from .resistance import EXACT_CAP


@dataclass
class SimilarityReport:
    kappa: float
    lambda_max: float
    lambda_min: float
    density_h: float
    density_g: float
    iterations: int
    method: str
    converged: bool = True

    def to_dict(self):
        return asdict(self)


def density(g):
    """Edges per node, ``|E| / |V|``."""
    return g.n_edges / g.n_nodes if g.n_nodes else 0.0


def offtree_density(g):
    """Edges beyond a spanning tree per node, ``(|E| - (|V| - 1)) / |V|``.

    This is the percentage-style density used for sparsifier tables (0.10
    means a spanning tree plus 10% of ``|V|`` extra edges).
    """
    return (g.n_edges - (g.n_nodes - 1)) / g.n_nodes if g.n_nodes else 0.0


def _pair(g, h):
    if g.n_nodes != h.n_nodes:
        raise NodeSetMismatch(f"graphs have {g.n_nodes} and {h.n_nodes} nodes")


def _grounded(g):
    L = g.laplacian()
    k = g.n_nodes - 1
    return L[:k, :k].tocsc()


def condition_number_exact(g, h, cap=EXACT_CAP):
    """Dense generalized eigensolve of ``L_G x = lam L_H x`` off the constants."""
    _pair(g, h)
    if g.n_nodes > cap:
        raise TooLarge(f"dense eigensolve limited to {cap} nodes, got {g.n_nodes}")
    if g.n_nodes < 2:
        raise ValueError("need at least two nodes")
    LG = _grounded(g).toarray()
    LH = _grounded(h).toarray()
    lam = scipy.linalg.eigh(LG, LH, eigvals_only=True)
    lmax, lmin = float(lam[-1]), float(lam[0])
    return SimilarityReport(lmax / lmin, lmax, lmin, density(h), density(g), 1, "exact")


class _Solver:
    """Solve with a grounded Laplacian by Jacobi-PCG or sparse LU."""

    def __init__(self, M, kind="cg", rtol=1e-8):
        self.M = M
        self.kind = kind
        self.rtol = rtol
        self.iterations = 0
        if kind == "direct":
            self._lu = splu(M)
        elif kind == "cg":
            dinv = 1.0 / M.diagonal()
            n = M.shape[0]
            self._pre = LinearOperator((n, n), matvec=lambda x: dinv * x, dtype=np.float64)
        else:
            raise ValueError(f"unknown solver {kind!r}")

    def __call__(self, b):
        if self.kind == "direct":
            return self._lu.solve(b)
        count = [0]

        def cb(_):
            count[0] += 1

        x, info = cg(self.M, b, rtol=self.rtol, atol=0.0, M=self._pre,
                     maxiter=10 * self.M.shape[0], callback=cb)
        self.iterations += count[0]
        if info != 0:
            raise SolverFailure(f"CG did not reach rtol={self.rtol} (info={info})")
        return x


def _power(A, B, solve_B, tol, max_iter, rng):
    """Largest eigenvalue of ``B^-1 A`` by power iteration, B-normalised."""
    x = rng.standard_normal(A.shape[0])
    x /= np.sqrt(x @ (B @ x))
    prev = None
    for it in range(1, max_iter + 1):
        Ax = A @ x
        rho = float(x @ Ax)  # x is B-normalised
        if prev is not None and abs(rho - prev) <= tol * abs(rho):
            return rho, it, True
        prev = rho
        y = solve_B(Ax)
        x = y / np.sqrt(y @ (B @ y))
    return rho, max_iter, False


def _lanczos(A, B, solve_B, tol, max_iter, rng):
    n = A.shape[0]
    Minv = LinearOperator((n, n), matvec=solve_B, dtype=np.float64)
    v0 = rng.standard_normal(n)
    try:
        val = eigsh(A, k=1, M=B, Minv=Minv, which="LA", tol=tol * 1e-2,
                    maxiter=max_iter, v0=v0, return_eigenvectors=False)
    except Exception as exc:  # ARPACK no-convergence
        raise SolverFailure(str(exc)) from exc
    return float(val[0]), 0, True


def condition_number_iterative(g, h, tol=1e-3, max_iter=2000, solver="cg", eig="lanczos",
                               rtol=1e-8, seed=0, strict=False):
    """Extreme pencil eigenvalues by iteration on ``L_H^-1 L_G`` and its reverse.

    ``solver`` is ``"cg"`` (Jacobi-preconditioned, relative residual
    ``rtol``) or ``"direct"`` (sparse LU).  ``eig`` is ``"lanczos"``
    (ARPACK, the default) or ``"power"``, which stops when successive
    Rayleigh quotients agree to ``tol``; that stopping rule can leave a
    relative error several times ``tol`` when the top of the spectrum is
    clustered.  A non-converged run returns the best estimate with
    ``converged=False``, or raises :class:`NoConvergence` when ``strict``.
    """
    _pair(g, h)
    if g.n_nodes < 2:
        raise ValueError("need at least two nodes")
    if not (g.is_connected() and h.is_connected()):
        raise SolverFailure("both graphs must be connected")
    LG = _grounded(g)
    LH = _grounded(h)
    sG = _Solver(LG, solver, rtol)
    sH = _Solver(LH, solver, rtol)
    rng = np.random.default_rng(seed)
    run = {"power": _power, "lanczos": _lanczos}[eig]
    lmax, it1, ok1 = run(LG, LH, sH, tol, max_iter, rng)
    mu, it2, ok2 = run(LH, LG, sG, tol, max_iter, rng)
    lmin = 1.0 / mu
    rep = SimilarityReport(lmax / lmin, lmax, lmin, density(h), density(g),
                           it1 + it2, f"iterative-{eig}-{solver}", ok1 and ok2)
    if not rep.converged:
        if strict:
            raise NoConvergence(f"no convergence within {max_iter} iterations", rep)
        warnings.warn(f"condition number estimate did not converge in {max_iter} iterations")
    return rep


def exact_distortion(g, u, v, w, k, cap=EXACT_CAP):
    """``w * ||U_K^T b_uv||^2`` with ``U_K = [u_2/sqrt(l_2), ..., u_K/sqrt(l_K)]``."""
    n = g.n_nodes
    if n > cap:
        raise TooLarge(f"dense eigensolve limited to {cap} nodes, got {n}")
    if not 2 <= k <= n:
        raise BadK(f"k must lie in [2, {n}], got {k}")
    lam, U = np.linalg.eigh(g.dense_laplacian())
    proj = U[u, 1:k] - U[v, 1:k]
    return float(w * np.sum(proj * proj / lam[1:k]))


def exact_distortions(g, pairs, weights, k=None, cap=EXACT_CAP):
    """Batch :func:`exact_distortion` sharing one eigendecomposition."""
    n = g.n_nodes
    if n > cap:
        raise TooLarge(f"dense eigensolve limited to {cap} nodes, got {n}")
    k = n if k is None else k
    if not 2 <= k <= n:
        raise BadK(f"k must lie in [2, {n}], got {k}")
    lam, U = np.linalg.eigh(g.dense_laplacian())
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    proj = U[pairs[:, 0], 1:k] - U[pairs[:, 1], 1:k]
    return np.asarray(weights, dtype=np.float64) * np.sum(proj * proj / lam[1:k], axis=1)

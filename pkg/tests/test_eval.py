import numpy as np
import pytest
from scipy.linalg import eigh

from ingrass.baseline import SparsifierConfig, baseline_sparsify
from ingrass.errors import BadK, NoConvergence, NodeSetMismatch, TooLarge
from ingrass.eval import (
    condition_number_exact,
    condition_number_iterative,
    density,
    exact_distortion,
    exact_distortions,
    offtree_density,
)
from ingrass.generators import path_graph, random_connected_graph
from ingrass.graph import WeightedGraph
from ingrass.resistance import exact_resistance

from conftest import triangle


def test_identity():
    g = random_connected_graph(60, seed=0, weights="uniform")
    rep = condition_number_exact(g, g)
    assert rep.kappa == pytest.approx(1.0, abs=1e-9)
    it = condition_number_iterative(g, g)
    assert it.kappa == pytest.approx(1.0, abs=1e-6)


def test_triangle_vs_path_by_hand():
    g = triangle()
    h = WeightedGraph(3, [0, 1], [1, 2], [1.0, 1.0])
    rep = condition_number_exact(g, h)
    # brute-force Rayleigh quotients over the plane orthogonal to the ones vector
    t = np.linspace(0, np.pi, 20001)
    b1 = np.array([1, -1, 0]) / np.sqrt(2)
    b2 = np.array([1, 1, -2]) / np.sqrt(6)
    X = np.outer(np.cos(t), b1) + np.outer(np.sin(t), b2)
    LG, LH = g.dense_laplacian(), h.dense_laplacian()
    q = np.einsum("ij,jk,ik->i", X, LG, X) / np.einsum("ij,jk,ik->i", X, LH, X)
    assert rep.lambda_max == pytest.approx(q.max(), rel=1e-6)
    assert rep.lambda_min == pytest.approx(q.min(), rel=1e-6)
    # the pencil is 1 + h-resistance of the extra edge on its range: lambda_max = 3
    assert rep.lambda_max == pytest.approx(3.0)
    assert rep.lambda_min == pytest.approx(1.0)


def test_scale_invariance():
    g = random_connected_graph(80, seed=1, weights="loguniform")
    h = baseline_sparsify(g, SparsifierConfig.from_offtree(0.1, 80))
    a = condition_number_exact(g, h).kappa
    b = condition_number_exact(g.scaled(3.0), h.scaled(3.0)).kappa
    assert a == pytest.approx(b, rel=1e-9)


def test_grounded_matches_pseudoinverse_pencil():
    g = random_connected_graph(40, seed=2, weights="uniform")
    h = baseline_sparsify(g, SparsifierConfig.from_offtree(0.2, 40))
    LG, LH = g.dense_laplacian(), h.dense_laplacian()
    # restrict both to an orthonormal basis of the complement of the ones vector
    Q, _ = np.linalg.qr(np.column_stack([np.ones(40), np.eye(40)[:, :-1]]))
    B = Q[:, 1:]
    lam = eigh(B.T @ LG @ B, B.T @ LH @ B, eigvals_only=True)
    rep = condition_number_exact(g, h)
    assert rep.lambda_max == pytest.approx(lam[-1], rel=1e-9)
    assert rep.lambda_min == pytest.approx(lam[0], rel=1e-9)


@pytest.mark.parametrize("solver", ["cg", "direct"])
@pytest.mark.parametrize("eig", ["power", "lanczos"])
def test_iterative_close_to_exact(solver, eig):
    g = random_connected_graph(200, seed=3, weights="uniform")
    h = baseline_sparsify(g, SparsifierConfig.from_offtree(0.1, 200))
    ex = condition_number_exact(g, h)
    it = condition_number_iterative(g, h, solver=solver, eig=eig, tol=1e-4)
    assert it.converged
    assert it.kappa == pytest.approx(ex.kappa, rel=0.05)
    # h is a subgraph of g, so the true lambda_min is 1
    assert it.lambda_min == pytest.approx(1.0, rel=1e-3)
    if eig == "lanczos":
        assert it.kappa == pytest.approx(ex.kappa, rel=2e-3)


def test_no_convergence_flag():
    g = random_connected_graph(200, seed=4)
    h = baseline_sparsify(g, SparsifierConfig.from_offtree(0.05, 200))
    with pytest.warns(UserWarning):
        rep = condition_number_iterative(g, h, eig="power", max_iter=2, tol=1e-12)
    assert not rep.converged
    with pytest.raises(NoConvergence) as info:
        condition_number_iterative(g, h, eig="power", max_iter=2, tol=1e-12, strict=True)
    assert info.value.report.kappa > 1


def test_errors():
    g = path_graph(5)
    with pytest.raises(NodeSetMismatch):
        condition_number_exact(g, path_graph(6))
    with pytest.raises(TooLarge):
        condition_number_exact(g, g, cap=4)
    with pytest.raises(BadK):
        exact_distortion(g, 0, 1, 1.0, 1)
    with pytest.raises(BadK):
        exact_distortion(g, 0, 1, 1.0, 6)


def test_distortion_limit_and_linearity():
    g = random_connected_graph(50, seed=5, weights="uniform")
    for p, q in [(0, 1), (10, 40)]:
        full = exact_distortion(g, p, q, 2.5, 50)
        assert full == pytest.approx(2.5 * exact_resistance(g, p, q), rel=1e-8)
        assert exact_distortion(g, p, q, 5.0, 50) == pytest.approx(2 * full, rel=1e-12)
    vals = [exact_distortion(g, 3, 33, 1.0, k) for k in range(2, 51)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    batch = exact_distortions(g, [(0, 1), (10, 40)], [2.5, 2.5])
    assert batch[1] == pytest.approx(exact_distortion(g, 10, 40, 2.5, 50), rel=1e-12)


def test_distortion_k2_single_eigenpair():
    # k = 2 keeps only the Fiedler pair: (u2[p] - u2[q])^2 / lambda_2
    n = 12
    g = path_graph(n)
    lam2 = 2 - 2 * np.cos(np.pi / n)
    u2 = np.cos(np.pi * (np.arange(n) + 0.5) / n)
    u2 /= np.linalg.norm(u2)
    for p, q in [(0, 11), (2, 5)]:
        want = 1.5 * (u2[p] - u2[q]) ** 2 / lam2
        assert exact_distortion(g, p, q, 1.5, 2) == pytest.approx(want, rel=1e-9)


def test_density():
    assert density(path_graph(3)) == pytest.approx(2 / 3)
    assert density(WeightedGraph(5, [], [], [])) == 0.0
    assert offtree_density(path_graph(10)) == 0.0
    assert offtree_density(triangle()) == pytest.approx(1 / 3)

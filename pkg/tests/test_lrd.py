import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ingrass.errors import EmbedderMismatch, NotConnected, OutOfRange, SameNode
from ingrass.generators import path_graph, random_connected_graph, star_graph
from ingrass.graph import WeightedGraph
from ingrass.lrd import (
    ClusterPairIndex,
    build_pair_index,
    default_levels,
    embedding_vector,
    lrd_decompose,
    resistance_upper_bound,
    shared_level,
)
from ingrass.resistance import build_embedder, estimate_resistances

from conftest import fig_graph


def setup(n=200, seed=0, **kw):
    g = random_connected_graph(n, avg_degree=4, seed=seed, weights="uniform")
    emb = build_embedder(g, m=8, seed=seed)
    return g, emb, lrd_decompose(g, emb, **kw)


def check_invariants(h):
    A = h.assignment
    n = h.n_nodes
    assert np.array_equal(A[0], np.arange(n))
    assert np.all(h.diameter[0] == 0)
    for lev in range(1, h.levels + 1):
        row = A[lev]
        # labels are the smallest member id
        first = np.full(n, n)
        np.minimum.at(first, row, np.arange(n))
        assert np.array_equal(first[row], row)
        # nesting: clusters of level lev-1 map into a single cluster at lev
        prev = A[lev - 1]
        assert np.array_equal(row[prev], row)
        labels = np.unique(row)
        assert np.all(h.diameter[lev, labels] <= h.threshold[lev] * (1 + 1e-12))
        assert np.array_equal(np.bincount(row, minlength=n)[labels], h.cluster_size[lev, labels])
        assert h.cluster_size[lev].sum() == n
        assert h.n_clusters(lev) <= h.n_clusters(lev - 1)


@pytest.mark.parametrize("seed", range(4))
def test_invariants_random(seed):
    _, _, h = setup(300, seed)
    check_invariants(h)
    assert h.levels == default_levels(300)
    assert np.allclose(h.threshold[2:] / h.threshold[1:-1], 2.0)


def test_nesting_growth2_levels4_exhaustive():
    g = random_connected_graph(500, seed=9)
    h = lrd_decompose(g, build_embedder(g, seed=1), levels=4, growth=2.0)
    check_invariants(h)
    A = h.assignment
    for lev in range(1, 4):
        same = A[lev][:, None] == A[lev][None, :]
        higher = A[lev + 1][:, None] == A[lev + 1][None, :]
        assert not np.any(same & ~higher)


def test_star_large_threshold_single_cluster():
    g = star_graph(4)
    h = lrd_decompose(g, edge_resistance=np.ones(4), base_threshold=100.0, levels=2)
    assert np.all(h.assignment[1] == 0)
    # sum of the four merge bounds
    assert h.diameter[1, 0] <= 4.0 + 1e-12


def test_merge_rule_by_hand():
    # path 0-1-2-3 with scores 1, 1, 1 and threshold 2: (0,1) merges (diam 1),
    # (1,2) would give 1 + 0 + 1 = 2 <= 2, so it merges too; (2,3) would need 3
    g = path_graph(4)
    h = lrd_decompose(g, edge_resistance=np.ones(3), base_threshold=2.0, levels=2, growth=2.0)
    assert h.assignment[1].tolist() == [0, 0, 0, 3]
    assert h.diameter[1, 0] == 2.0
    assert h.assignment[2].tolist() == [0, 0, 0, 0]
    assert h.diameter[2, 0] == 3.0


def test_diameter_dominates_internal_paths():
    g, emb, h = setup(300, 3)
    r = estimate_resistances(emb, g.u, g.v)
    for lev in (1, 3, 5):
        row = h.assignment[lev]
        inside = row[g.u] == row[g.v]
        M = csr_matrix((r[inside], (g.u[inside], g.v[inside])), shape=(g.n_nodes,) * 2)
        for c, members in h.clusters(lev).items():
            if len(members) < 2 or len(members) > 60:
                continue
            D = shortest_path(M, directed=False, indices=members)[:, members]
            assert D.max() <= h.diameter[lev, c] * (1 + 1e-9)


def test_bound_monotone_over_levels():
    _, _, h = setup(300, 4)
    for p, q in itertools.combinations(range(0, 300, 7), 2):
        lev = shared_level(h, p, q)
        if lev is None:
            continue
        b = resistance_upper_bound(h, p, q)
        for up in range(lev + 1, h.levels + 1):
            assert b <= h.diameter[up, h.assignment[up, p]] + 1e-12


def test_upper_bound_with_exact_scores():
    g = random_connected_graph(60, seed=5, weights="uniform")
    P = np.linalg.pinv(g.dense_laplacian())
    d = np.diag(P)
    R = d[:, None] + d[None, :] - 2 * P
    h = lrd_decompose(g, edge_resistance=R[g.u, g.v])
    for p, q in itertools.combinations(range(60), 2):
        if shared_level(h, p, q) is not None:
            assert resistance_upper_bound(h, p, q) >= R[p, q] - 1e-9


def test_two_node_bound():
    g = WeightedGraph(2, [0], [1], [2.0])
    h = lrd_decompose(g, build_embedder(g, m=2))
    assert resistance_upper_bound(h, 0, 1) >= 0.5 - 1e-9


def test_fallback_bound():
    g = path_graph(5)
    h = lrd_decompose(g, edge_resistance=np.array([1.0, 1.0, 100.0, 1.0]), base_threshold=1.0,
                      levels=2)
    assert h.n_clusters(2) > 1
    assert shared_level(h, 0, 4) is None
    assert resistance_upper_bound(h, 0, 4) == h.threshold[-1] * h.growth
    assert resistance_upper_bound(h, 0, 1) == 1.0


def test_embedding_vector():
    _, _, h = setup(50, 1)
    v = embedding_vector(h, 7)
    assert len(v) == h.levels
    full = embedding_vector(h, 7, include_level0=True)
    assert full[0] == 7 and np.array_equal(full[1:], v)
    with pytest.raises(OutOfRange):
        embedding_vector(h, 50)
    top = h.assignment[-1]
    same_top = np.flatnonzero(top == top[7])
    for x in same_top[:5]:
        assert embedding_vector(h, x)[-1] == v[-1]


def test_errors():
    g = path_graph(6)
    with pytest.raises(EmbedderMismatch):
        lrd_decompose(g, build_embedder(path_graph(7)))
    with pytest.raises(NotConnected):
        lrd_decompose(WeightedGraph(4, [0, 2], [1, 3], [1.0, 1.0]), edge_resistance=np.ones(2))
    with pytest.raises(ValueError):
        lrd_decompose(g, build_embedder(g), levels=1)
    h = lrd_decompose(g, build_embedder(g))
    with pytest.raises(SameNode):
        resistance_upper_bound(h, 2, 2)


def test_fig_hierarchy():
    _, _, h = fig_graph()
    check_invariants(h)
    assert h.max_cluster_sizes().tolist() == [1, 2, 3, 6, 14]
    # nodes 5 and 9 of the drawing: different clusters at levels 1-3, shared at 4
    a, b = embedding_vector(h, 4), embedding_vector(h, 8)
    assert [x != y for x, y in zip(a, b)] == [True, True, True, False]
    assert shared_level(h, 4, 8) == 4
    assert resistance_upper_bound(h, 4, 8) == h.diameter[4, h.assignment[4, 4]]


def test_pair_index_single_edge():
    g = WeightedGraph(2, [0], [1], [1.0])
    h = lrd_decompose(g, edge_resistance=np.array([5.0]), base_threshold=1.0, levels=2)
    idx = build_pair_index(g, h)
    assert idx.cross(1, 0, 1) == [0] and idx.cross(1, 1, 0) == [0]
    assert idx.intra(1, 0) == []


@pytest.mark.parametrize("seed", range(3))
def test_pair_index_partition(seed):
    g, _, h = setup(200, seed)
    idx = build_pair_index(g, h)
    total = 0
    for lev in range(1, h.levels + 1):
        nc, ni = idx.level_counts(lev)
        total += nc + ni
        row = h.assignment[lev]
        for e in range(0, g.n_edges, 11):
            a, b = row[g.u[e]], row[g.v[e]]
            if a == b:
                assert e in idx.intra(lev, a)
            else:
                assert e in idx.cross(lev, a, b)
                assert idx.has_cross(lev, b, a)
    assert total == g.n_edges * h.levels
    # intra-level edges stay intra at every higher level
    lev1 = set()
    for c in np.unique(h.assignment[1]):
        lev1.update(idx.intra(1, c))
    for e in list(lev1)[:30]:
        for lev in range(2, h.levels + 1):
            assert e in idx.intra(lev, h.assignment[lev, g.u[e]])


def test_pair_index_register_and_arrays():
    g, _, h = setup(100, 2)
    idx = build_pair_index(g, h)
    idx.register(g.n_edges, 0, 99, h)
    for lev in range(1, h.levels + 1):
        a, b = h.assignment[lev, 0], h.assignment[lev, 99]
        assert g.n_edges in (idx.intra(lev, a) if a == b else idx.cross(lev, a, b))
    again = ClusterPairIndex.from_arrays(100, idx.to_arrays())
    assert again == idx


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 60), st.integers(0, 10_000), st.floats(1.2, 4.0), st.integers(2, 8))
def test_invariants_property(n, seed, growth, levels):
    g = random_connected_graph(n, avg_degree=3, seed=seed, weights="loguniform")
    h = lrd_decompose(g, build_embedder(g, m=6, seed=seed), levels=levels, growth=growth)
    check_invariants(h)
    idx = build_pair_index(g, h)
    assert sum(sum(idx.level_counts(lev)) for lev in range(1, levels + 1)) == g.n_edges * levels

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otsconn.constraints import make_uniquely_balanced_c
from otsconn.graph import (
    BalanceKind,
    EnumerationCapError,
    Multigraph,
    NisCatalog,
    classify_balance,
    component_count,
    connected_components,
    edge_induced,
    enumerate_connected_nis,
    is_connected,
    is_unbalanced_nis,
    laplacian,
    oriented_incidence,
    potential_feasible,
)
from otsconn.grid import Bus, Network, Branch

from conftest import SWEEP_GRAPHS, all_topologies, brute_components


def _brute_nis(graph):
    """Subset filter: every nonempty node subset whose induced subgraph is connected."""
    out = set()
    nodes = range(1, graph.n + 1)
    for r in range(1, graph.n + 1):
        for sub in itertools.combinations(nodes, r):
            s = set(sub)
            edges = [(f, t) for f, t in graph.edges if f in s and t in s]
            relabel = {v: i for i, v in enumerate(sorted(s), start=1)}
            comps = brute_components(len(s), [(relabel[f], relabel[t]) for f, t in edges])
            if len(comps) == 1:
                out.add(frozenset(s))
    return out


@st.composite
def multigraphs(draw, max_n=6, max_m=9):
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(0, max_m))
    edges = []
    for _ in range(m):
        f = draw(st.integers(1, n))
        t = draw(st.integers(1, n - 1))
        edges.append((f, t if t < f else t + 1))
    return Multigraph(n, edges)


def test_incidence_examples():
    assert oriented_incidence(Multigraph(2, [(1, 2)])).tolist() == [[1], [-1]]
    E = oriented_incidence(Multigraph(3, [(1, 2), (2, 3)]))
    assert E.T.tolist() == [[1, -1, 0], [0, 1, -1]]


def test_laplacian_examples():
    assert laplacian(Multigraph(2, [(1, 2)])).tolist() == [[1, -1], [-1, 1]]
    assert laplacian(Multigraph(2, [(1, 2), (1, 2)])).tolist() == [[2, -2], [-2, 2]]
    assert laplacian(Multigraph(2, [(1, 2)]), [5.0]).tolist() == [[5, -5], [-5, 5]]
    with pytest.raises(ValueError):
        laplacian(Multigraph(2, [(1, 2)]), [0.0])


@settings(max_examples=80, deadline=None)
@given(g=multigraphs(), data=st.data())
def test_laplacian_identity_and_column_sums(g, data):
    w = data.draw(st.lists(st.floats(0.1, 50), min_size=g.m, max_size=g.m))
    E = oriented_incidence(g)
    assert np.all(E.sum(axis=0) == 0)
    L = laplacian(g, w)
    assert np.array_equal(L, (E * np.asarray(w)) @ E.T)
    assert np.allclose(L, L.T)
    assert np.allclose(L.sum(axis=1), 0)


def test_multigraph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Multigraph(2, [(1, 3)])
    with pytest.raises(ValueError):
        Multigraph(2, [(1, 1)])


def test_edge_induced_examples():
    g = Multigraph(4, [(1, 2), (2, 3), (3, 4), (4, 1)])
    assert edge_induced(g, [1, 1, 1, 1]) == g
    empty = edge_induced(g, [0, 0, 0, 0])
    assert empty.n == 4 and empty.m == 0
    assert connected_components(empty) == [[1], [2], [3], [4]]
    path = edge_induced(g, [1, 1, 1, 0])
    assert path.edges == ((1, 2), (2, 3), (3, 4))
    with pytest.raises(ValueError):
        edge_induced(g, [1, 1])


def test_components_examples():
    assert component_count(Multigraph(3, [(1, 2), (2, 3)])) == 1
    fig1_split = Multigraph(6, [(1, 2), (2, 3), (1, 3), (4, 5), (4, 5), (5, 6)])
    assert connected_components(fig1_split) == [[1, 2, 3], [4, 5, 6]]


@settings(max_examples=100, deadline=None)
@given(g=multigraphs(max_n=8, max_m=12), data=st.data())
def test_components_match_flooding_and_ignore_orientation(g, data):
    flips = data.draw(st.lists(st.booleans(), min_size=g.m, max_size=g.m))
    flipped = Multigraph(g.n, [(t, f) if fl else (f, t) for (f, t), fl in zip(g.edges, flips)])
    expected = sorted(sorted(c) for c in brute_components(g.n, g.edges))
    assert connected_components(g) == expected
    assert connected_components(flipped) == expected


def test_nis_examples():
    tri = Multigraph(3, [(1, 2), (2, 3), (3, 1)])
    cat = enumerate_connected_nis(tri)
    assert len(cat) == 7
    assert cat.node_sets[0] == frozenset({1, 2, 3})
    assert len(enumerate_connected_nis(Multigraph(2, [(1, 2)]))) == 3


def test_nis_fig2_style_graph_by_brute_force():
    # a 4-node graph: triangle 1-2-3 with pendant 4 on node 3
    g = Multigraph(4, [(1, 2), (2, 3), (3, 1), (3, 4)])
    cat = enumerate_connected_nis(g)
    assert set(cat.node_sets) == _brute_nis(g)
    assert len(cat) == 12  # 4 singles, 4 pairs, 3 triples, V
    J = cat.matrix()
    assert J.shape == (12, 4)
    assert J[0].tolist() == [1, 1, 1, 1]
    assert sorted(J.sum(axis=1).tolist()) == [1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 4]


@settings(max_examples=80, deadline=None)
@given(g=multigraphs(max_n=6, max_m=9))
def test_nis_enumeration_matches_brute_force(g):
    cat = enumerate_connected_nis(g)
    assert len(set(cat.node_sets)) == len(cat.node_sets)
    brute = _brute_nis(g)
    if is_connected(g):
        assert set(cat.node_sets) == brute
        assert cat.node_sets[0] == frozenset(range(1, g.n + 1))
    else:
        assert set(cat.node_sets) == brute


def test_nis_max_nodes_and_cap():
    g = SWEEP_GRAPHS["wheel5"]
    cat = enumerate_connected_nis(g, max_nodes=2)
    assert cat.node_sets[0] == frozenset(range(1, 7))
    assert all(len(s) <= 2 for s in cat.node_sets[1:])
    with pytest.raises(EnumerationCapError):
        enumerate_connected_nis(g, cap=10)


def test_classify_examples():
    g = SWEEP_GRAPHS["house-x"]
    cat = enumerate_connected_nis(g)
    assert classify_balance(make_uniquely_balanced_c(5, 1), cat).kind is BalanceKind.UNIQUELY_BALANCED
    zero = classify_balance(np.zeros(5), cat)
    assert zero.kind is BalanceKind.MULTIPLY_BALANCED and zero.n_balanced == len(cat)
    assert classify_balance(np.ones(5), cat).kind is BalanceKind.UNBALANCED
    # a zero pair without a zero total is neither of the named kinds
    assert classify_balance(np.array([1, -1, 1, 1, 1.0]), cat).kind is BalanceKind.NEITHER


@pytest.mark.parametrize("name", sorted(SWEEP_GRAPHS))
def test_canonical_c_uniquely_balanced_for_every_pivot(name):
    g = SWEEP_GRAPHS[name]
    cat = enumerate_connected_nis(g)
    for pivot in range(1, g.n + 1):
        cls = classify_balance(make_uniquely_balanced_c(g.n, pivot), cat)
        assert cls.kind is BalanceKind.UNIQUELY_BALANCED
        assert set(cls.b[1:]) <= set(range(-g.n, g.n + 1)) - {0}


def test_potential_examples():
    c = make_uniquely_balanced_c(4)
    assert potential_feasible(Multigraph(4, [(1, 2), (2, 3), (3, 4)]), c)
    assert not potential_feasible(Multigraph(4, [(1, 2), (3, 4)]), c)


def test_lemma_sweep_five_nodes_seven_edges():
    g = SWEEP_GRAPHS["house-x"]
    c = make_uniquely_balanced_c(g.n)
    for z in all_topologies(g.m):
        sub = edge_induced(g, z)
        assert potential_feasible(sub, c) == (len(brute_components(g.n, sub.edges)) == 1)


def test_potential_ignores_weights():
    g = Multigraph(3, [(1, 2), (2, 3)], [100.0, 0.01])
    assert potential_feasible(g, make_uniquely_balanced_c(3, 2))


def _net(p_d, p_g_max):
    return Network((Bus(1, p_d, 0.0, p_g_max), Bus(2, 0.0, 0.0, 10.0)),
                   (Branch(1, 1, 2, 1.0, 10.0),))


def test_unbalanced_nis_examples():
    assert is_unbalanced_nis({1}, _net(5.0, 3.0))
    assert not is_unbalanced_nis({1}, _net(2.0, 3.0))
    pure = Network((Bus(1, 2.0), Bus(2, 1.0), Bus(3, 0.0, 0.0, 9.0)),
                   (Branch(1, 1, 2, 1.0, 5.0), Branch(2, 2, 3, 1.0, 5.0)))
    assert is_unbalanced_nis({1, 2}, pure)
    # a generator whose range contains the load is balanced
    assert not is_unbalanced_nis({3}, pure)


def test_nis_catalog_matrix():
    cat = NisCatalog(3, (frozenset({1, 2, 3}), frozenset({2})))
    assert cat.matrix().tolist() == [[1, 1, 1], [0, 1, 0]]

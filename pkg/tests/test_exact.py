import pytest
from hypothesis import given, settings

from qredumis.exact import (LimitExceeded, count_independent_sets, enumerate_independent_sets,
                            independence_polynomial, max_independent_set, mis_size)
from qredumis.graph import Graph, complete_graph, cycle_graph, is_independent, path_graph

from conftest import branch_mis_size, brute_count_by_size, brute_mis_sets, graphs


@pytest.mark.parametrize("graph,size,expected", [
    (complete_graph(3), 1, 3), (complete_graph(3), 0, 1),
    (cycle_graph(5), 2, 5), (cycle_graph(5), 1, 5),
    (path_graph(3), 2, 1), (path_graph(3), 3, 0),
])
def test_counts(graph, size, expected):
    assert count_independent_sets(graph, size) == expected


@settings(max_examples=120, deadline=None)
@given(graphs(max_n=12))
def test_polynomial_matches_bitmask_scan(g):
    poly = independence_polynomial(g)
    ref = brute_count_by_size(g)
    assert list(ref[:len(poly)]) == poly
    assert not ref[len(poly):].any()


@settings(max_examples=120, deadline=None)
@given(graphs(max_n=12))
def test_mis_and_enumeration(g):
    mis = max_independent_set(g)
    assert is_independent(g, mis)
    assert len(mis) == branch_mis_size(g)
    if g.n:
        top = brute_mis_sets(g)
        assert set(enumerate_independent_sets(g, len(mis))) == top


def test_label_invariance():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 4)])
    perm = [3, 0, 4, 1, 2]
    h = Graph.from_edges(5, [(perm[u], perm[v]) for u, v in g.edges])
    assert independence_polynomial(g) == independence_polynomial(h)


def test_limit():
    with pytest.raises(LimitExceeded, match="limit"):
        mis_size(Graph(41))
    assert count_independent_sets(Graph(41), 2, limit=41) == 41 * 40 // 2

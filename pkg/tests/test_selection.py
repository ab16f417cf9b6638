import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qredumis.graph import Graph, cycle_graph, is_independent, path_graph
from qredumis.sampling import SampleSet, sample_exact
from qredumis.selection import (SelectionError, SelectionParams, build_histogram, filter_shots,
                                restricted_candidates, select, select_per_component)

from conftest import er_graph


def sets_of_sizes(sizes):
    return SampleSet.from_sets([set(range(k)) for k in sizes], 6)


def test_filter_top_two_sizes():
    out = filter_shots(sets_of_sizes([5, 5, 4, 2, 1]))
    assert sorted(len(s) for s in out.repaired_sets) == [4, 5, 5]
    out = filter_shots(sets_of_sizes([3, 3, 3]))
    assert len(out.repaired_sets) == 3
    with pytest.raises(SelectionError):
        filter_shots(SampleSet.from_sets([], 3))


def test_filter_exact_c5_unchanged():
    s = sample_exact(cycle_graph(5), 300, 0)
    assert filter_shots(s).repaired_sets == s.repaired_sets


def test_histogram_examples(toy_graph):
    samples = SampleSet.from_sets([{0, 3}, {2, 3}], 4)
    h = build_histogram(samples, toy_graph)
    assert h.counts[3] == h.shots_used == 2 and h.counts[1] == 0
    h = build_histogram(SampleSet.from_sets([{0, 2}], 3), path_graph(3))
    assert list(h.counts) == [1, 0, 1]


def test_histogram_c5_uniform():
    s = sample_exact(cycle_graph(5), 20000, 3)
    s = SampleSet.from_sets([x for x in s.repaired_sets if len(x) == 2], 5)
    h = build_histogram(s, cycle_graph(5))
    assert np.allclose(h.counts / h.shots_used, 0.4, atol=0.02)


def test_toy_in_and_out(toy_graph):
    samples = SampleSet.from_sets([{0, 3}, {2, 3}], 4)
    sel = select(samples, toy_graph, SelectionParams(rcl_size=1), seed=0)
    assert sel.selected == {3} and sel.removed_all == {3, 1}
    sel = select(samples, toy_graph, SelectionParams(rcl_size=1, strategy="out"), seed=0)
    assert sel.removed == {1} and sel.selected == set() and sel.removed_all == {1}


@pytest.mark.parametrize("strategy", ["in", "out", "random"])
def test_single_vertex_kernel(strategy):
    sel = select(SampleSet.from_sets([{0}], 1), Graph(1), SelectionParams(strategy=strategy), 0)
    assert sel.removed_all == {0}


def test_lambda_too_large():
    with pytest.raises(SelectionError):
        select(SampleSet.from_sets([{0}], 2), Graph(2), SelectionParams(size=3), 0)
    with pytest.raises(SelectionError):
        SelectionParams(size=3, rcl_size=2)
    with pytest.raises(SelectionError):
        select(None, Graph(2), SelectionParams(), 0)


def test_rcl_fraction_rounds_up():
    p = SelectionParams()
    assert p.rcl_for(10) == 4 and p.rcl_for(11) == 5 and p.rcl_for(1) == 1
    assert SelectionParams(size=3).rcl_for(2) == 3


def test_degree_bias_tie_break():
    # star centre 0 with leaves 1..3 plus an isolated 4; equal counts everywhere
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3)])
    s = SampleSet.from_sets([{0, 4}, {1, 2, 3, 4}, {0, 4}, {1, 2, 3, 4}], 5)
    h = build_histogram(s, g)
    rcl = restricted_candidates(h, g, SelectionParams(rcl_size=5))
    assert rcl[0] == 4  # highest count
    assert rcl[1:] == [1, 2, 3, 0]  # count 2 each, low degree first
    rcl = restricted_candidates(h, g, SelectionParams(rcl_size=5, degree_bias=False))
    assert rcl[1:] == [0, 1, 2, 3]


def test_unanimous_vertex_tops_in_rcl():
    # C5 plus an isolated vertex 5, which lies in every maximum set
    g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    s = filter_shots(sample_exact(g, 2000, 0))
    assert all(5 in x for x in s.repaired_sets if len(x) == 3)
    rcl = restricted_candidates(build_histogram(s, g), g, SelectionParams(rcl_size=1))
    assert rcl == [5]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.sampled_from(["in", "out", "random"]))
def test_selection_invariants(seed, lam, strategy):
    g = er_graph(10, 0.3, seed)
    samples = filter_shots(sample_exact(g, 100, seed))
    params = SelectionParams(size=lam, strategy=strategy)
    sel = select(samples, g, params, seed)
    assert sel.removed_all == sel.selected | sel.removed
    assert not sel.selected & sel.removed
    assert sel.removed_all <= set(range(g.n))
    assert is_independent(g, sel.selected)
    if strategy != "out":
        for v in sel.removed:
            assert g.neighbors(v) & sel.selected
    # histogram invariant under shot order
    rev = SampleSet.from_sets(samples.repaired_sets[::-1], g.n)
    assert list(build_histogram(rev, g).counts) == list(build_histogram(samples, g).counts)


def test_per_component_covers_each_component():
    g = Graph.from_edges(10, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                              (5, 6), (6, 7), (7, 8), (8, 9), (9, 5)])
    s = filter_shots(sample_exact(g, 200, 0))
    sel = select_per_component(s, g, SelectionParams(), 1)
    assert len(sel.selected) == 2
    assert any(v < 5 for v in sel.selected) and any(v >= 5 for v in sel.selected)

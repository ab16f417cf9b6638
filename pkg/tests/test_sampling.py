import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qredumis.graph import Graph, complete_graph, cycle_graph, is_independent, path_graph
from qredumis.sampling import (SampleSet, SamplerError, apply_loading_errors,
                               classical_energy, expected_load_probability, repair,
                               repair_all, sample, sample_annealing, sample_exact, to_ising)

from conftest import brute_mis_sets, er_graph, graphs


def bits_of(n):
    return [np.array(b) for b in itertools.product((0, 1), repeat=n)]


def test_energy_examples():
    assert classical_energy(complete_graph(3), [1, 1, 1], 2.0) == 3
    assert classical_energy(path_graph(3), [1, 0, 1], 2.0) == -2
    assert classical_energy(cycle_graph(4), [0] * 4) == 0
    with pytest.raises(ValueError):
        classical_energy(path_graph(3), [1, 0])
    with pytest.raises(ValueError):
        classical_energy(path_graph(3), [1, 0, 1], U=1.0)


def test_ising_examples():
    f = to_ising(Graph(1), 2.0)
    assert f.couplers == {} and list(f.fields) == [-0.5] and f.constant == -0.5
    f = to_ising(path_graph(2), 2.0)
    assert f.couplers == {(0, 1): 0.5} and list(f.fields) == [0, 0] and f.constant == -0.5


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=7), st.floats(1.01, 5.0))
def test_ising_equivalence(g, U):
    form = to_ising(g, U)
    for x in bits_of(g.n):
        assert abs(form.energy(2 * x - 1) - classical_energy(g, x, U)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=9, min_n=1))
def test_ground_states_are_maximum_sets(g):
    es = {tuple(x): classical_energy(g, x) for x in bits_of(g.n)}
    lo = min(es.values())
    mins = {frozenset(np.flatnonzero(x).tolist()) for x, e in es.items() if abs(e - lo) < 1e-9}
    assert mins == brute_mis_sets(g)


def test_repair_examples():
    assert repair(path_graph(3), [1, 0, 1]) == {0, 2}
    # with the max-conflict / smallest-id rule: 0 goes first, then 1
    assert repair(complete_graph(3), [1, 1, 1]) == {2}
    assert repair(path_graph(3), [1, 1, 0]) == {1}


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=10), st.data())
def test_repair_properties(g, data):
    x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=g.n, max_size=g.n)), dtype=int)
    s = repair(g, x)
    assert is_independent(g, s)
    assert s <= set(np.flatnonzero(x).tolist())
    y = np.zeros(g.n, dtype=int)
    y[sorted(s)] = 1
    assert repair(g, y) == s
    assert classical_energy(g, y) <= classical_energy(g, x)
    assert repair_all(g, x[None, :].astype(np.uint8))[0] == s


def test_exact_backend_c5():
    out = sample_exact(cycle_graph(5), 4000, 0)
    sizes = {len(s) for s in out.repaired_sets}
    assert sizes == {1, 2}
    assert {s for s in out.repaired_sets if len(s) == 2} == brute_mis_sets(cycle_graph(5))


def test_exact_backend_small_cases():
    assert all(s == {0} for s in sample_exact(Graph(1), 50, 0).repaired_sets)
    pool = {frozenset({0, 2}), frozenset({0}), frozenset({1}), frozenset({2})}
    assert set(sample_exact(path_graph(3), 500, 1).repaired_sets) == pool


def test_exact_backend_limit():
    with pytest.raises(ValueError, match="limit"):
        sample_exact(Graph(41), 1, 0)


def test_sa_path_mostly_optimal():
    out = sample_annealing(path_graph(3), 500, 0)
    assert np.mean([s == {0, 2} for s in out.repaired_sets]) >= 0.9


def test_sa_edgeless_takes_everything():
    out = sample_annealing(Graph(6), 50, 3)
    assert all(s == set(range(6)) for s in out.repaired_sets)


def test_sa_zero_sweeps_still_valid():
    g = er_graph(12, 0.3, 1)
    out = sample_annealing(g, 100, 5, sweeps=0)
    assert all(is_independent(g, s) for s in out.repaired_sets)
    assert len(set(map(tuple, out.bitstrings.tolist()))) > 50


@pytest.mark.parametrize("backend", ["exact", "sa"])
def test_backends_valid_and_deterministic(backend):
    g = er_graph(14, 0.25, 7)
    a = sample(g, 200, 11, backend)
    b = sample(g, 200, 11, backend)
    assert np.array_equal(a.bitstrings, b.bitstrings) and a.repaired_sets == b.repaired_sets
    assert all(is_independent(g, s) for s in a.repaired_sets)
    assert a.n_shots == 200


def test_sa_shots_independent_of_batch():
    g = er_graph(10, 0.3, 2)
    a = sample_annealing(g, 50, 4)
    b = sample_annealing(g, 20, 4)
    assert np.array_equal(a.bitstrings[:20], b.bitstrings)


def test_unknown_backend():
    with pytest.raises(SamplerError, match="unknown backend"):
        sample(Graph(2), 1, 0, "qpu")


def test_loading_zero_epsilon_keeps_all():
    s = SampleSet.from_sets([{0}] * 30, 3)
    out = apply_loading_errors(s, 0.0, 0)
    assert out.valid.all() and len(out.repaired_sets) == 30


@pytest.mark.parametrize("n,eps,expected", [(137, 0.007, 0.382), (37, 0.007, 0.771)])
def test_loading_retention(n, eps, expected):
    assert expected_load_probability(n, eps) == pytest.approx(expected, abs=1e-3)
    shots = SampleSet.from_sets([frozenset()] * 10000, n)
    out = apply_loading_errors(shots, eps, 123)
    p = expected_load_probability(n, eps)
    sigma = np.sqrt(p * (1 - p) / 10000)
    assert abs(out.valid.mean() - p) < 3 * sigma
    # unloaded sites read as empty
    assert out.bitstrings.sum() == 0


def test_loading_through_registry():
    g = er_graph(12, 0.2, 0)
    out = sample(g, 300, 1, "exact", {"epsilon": 0.05})
    assert 0 < len(out.repaired_sets) < 300
    assert out.meta["epsilon"] == 0.05


def test_sampleset_invariant():
    with pytest.raises(ValueError):
        SampleSet(np.zeros((2, 1), np.uint8), np.array([True, True]), (frozenset(),))

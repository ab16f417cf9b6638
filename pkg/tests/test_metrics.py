import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qredumis.driver import SolveReport
from qredumis.graph import Graph, complete_graph, cycle_graph
from qredumis.metrics import (count_independent_sets, estimate_pmis, estimate_success,
                              fit_scaling, hardness, pearson)

from conftest import brute_count_by_size, er_graph


def test_hardness_examples():
    k3 = hardness(complete_graph(3))
    assert k3.mis_size == 1 and k3.hardness == pytest.approx(1 / 3)
    c5 = hardness(cycle_graph(5))
    assert (c5.mis_size, c5.degeneracy_at_mis, c5.degeneracy_below) == (2, 5, 5)
    assert c5.hardness == pytest.approx(0.5)


def test_hardness_label_invariant():
    g = er_graph(14, 0.3, 1)
    perm = np.random.default_rng(0).permutation(14)
    h = Graph.from_edges(14, [(int(perm[u]), int(perm[v])) for u, v in g.edges])
    assert hardness(g) == hardness(h)


@pytest.mark.parametrize("seed", range(10))
def test_total_count_matches_scan(seed):
    g = er_graph(16 + seed % 5, 0.2, seed)
    ref = brute_count_by_size(g)
    assert sum(count_independent_sets(g, k) for k in range(g.n + 1)) == ref.sum()


def reports(sizes):
    return [SolveReport(incumbent=frozenset(range(s))) for s in sizes]


def test_pmis_extremes():
    e = estimate_pmis(reports([3] * 20), 3)
    assert (e.p_mis, e.ci_low, e.ci_high, e.n_runs) == (1.0, 1.0, 1.0, 20)
    assert estimate_pmis(reports([2] * 20), 3).p_mis == 0.0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=60), st.integers(10, 3000),
       st.integers(0, 100))
def test_ci_contains_point(xs, B, seed):
    e = estimate_success(xs, B, seed)
    assert e.ci_low <= e.p_mis <= e.ci_high
    assert 0 <= e.ci_low and e.ci_high <= 1


def test_ci_width_shrinks_with_runs():
    small = estimate_success([1, 0] * 10)
    big = estimate_success([1, 0] * 1000)
    assert big.ci_high - big.ci_low < small.ci_high - small.ci_low


def test_fit_recovers_planted():
    H = np.array([1.03, 2.0, 5.0, 17.0, 80.0, 400.0])
    P = 1 - np.exp(-2.0 * H ** -0.7)
    fit = fit_scaling(zip(H, P))
    assert fit.C == pytest.approx(2.0, rel=1e-6) and fit.beta == pytest.approx(0.7, rel=1e-6)


def test_fit_excludes_saturated_points():
    H = [1.0, 2.0, 4.0, 8.0, 16.0]
    P = [1.0, 0.8, 0.6, 0.4, 0.0]
    fit = fit_scaling(zip(H, P))
    assert fit.excluded == 2 and fit.used == 3


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_scaling([(2.0, 0.5)] * 5)
    with pytest.raises(ValueError):
        fit_scaling([(1.0, 0.5), (2.0, 1.0)])


def test_pearson():
    x = np.array([1.0, 2.0, 3.5, 7.0])
    assert pearson(x, 2 * x) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    y = np.array([2.0, 1.0, 4.0, 3.0])
    mx, my = x.mean(), y.mean()
    manual = sum((a - mx) * (b - my) for a, b in zip(x, y)) / math.sqrt(
        sum((a - mx) ** 2 for a in x) * sum((b - my) ** 2 for b in y))
    assert pearson(x, y) == pytest.approx(manual, abs=1e-12)
    with pytest.raises(ValueError):
        pearson([1, 1, 1], [1, 2, 3])

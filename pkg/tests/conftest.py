"""Independent oracles shared by the test modules.

They use nothing from the package except the Graph container, so a bug in
the solver code cannot leak into the expected values.
"""
import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from qredumis.graph import Graph


def all_masks(n):
    return np.arange(1 << n, dtype=np.int64)


def independent_mask_table(n, edges):
    """Boolean vector over all 2^n subsets: True where the subset is independent."""
    m = all_masks(n)
    ok = np.ones(len(m), dtype=bool)
    for u, v in edges:
        ok &= ((m >> u) & (m >> v) & 1) == 0
    return ok


def popcounts(n):
    m = all_masks(n)
    return np.array([bin(int(x)).count("1") for x in m]) if n <= 12 else \
        np.unpackbits(m.view(np.uint8)).reshape(len(m), -1).sum(1)


def brute_count_by_size(graph):
    """D_k for every k by scanning all 2^n subsets."""
    ok = independent_mask_table(graph.n, graph.edges)
    sizes = popcounts(graph.n)[ok]
    return np.bincount(sizes, minlength=graph.n + 1)


def brute_mis_sets(graph):
    ok = independent_mask_table(graph.n, graph.edges)
    sizes = popcounts(graph.n)
    best = sizes[ok].max()
    return {frozenset(i for i in range(graph.n) if m >> i & 1)
            for m in np.flatnonzero(ok & (sizes == best)).tolist()}


def branch_mis_size(graph):
    """Plain include/exclude recursion, used where 2^n scans are too slow (n <= 24).

    Degree-0/1 vertices are always taken (they are in some maximum set), so
    every branching step removes at least one vertex on one side and three on
    the other.
    """
    adj = [0] * graph.n
    for u, v in graph.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    memo = {}

    def rec(mask):
        if mask == 0:
            return 0
        if mask in memo:
            return memo[mask]
        best_v, best_d = -1, -1
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            d = bin(adj[v] & mask).count("1")
            if d <= 1:
                r = 1 + rec(mask & ~(1 << v) & ~adj[v])
                memo[mask] = r
                return r
            if d > best_d:
                best_v, best_d = v, d
        v = best_v
        r = max(rec(mask & ~(1 << v)), 1 + rec(mask & ~(1 << v) & ~adj[v]))
        memo[mask] = r
        return r

    return rec((1 << graph.n) - 1)


def er_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(n, edges)


@st.composite
def graphs(draw, max_n=10, min_n=0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


@pytest.fixture
def toy_graph():
    # four-vertex example: triangle 0-1-2 with a pendant 3 on vertex 1
    return Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (1, 3)])


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])

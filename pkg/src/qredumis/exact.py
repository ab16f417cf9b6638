"""Exact independent-set combinatorics on bitmask graphs (n <= 40 by default)."""
from __future__ import annotations

import sys

from .graph import Graph

ENUMERATION_LIMIT = 40


class LimitExceeded(ValueError):
    pass


def check_limit(graph: Graph, limit: int = ENUMERATION_LIMIT, what: str = "enumeration"):
    if graph.n > limit:
        raise LimitExceeded(f"{what} limit exceeded: graph has {graph.n} vertices, "
                            f"limit is {limit}")


def _lowbit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _clique_cover_size(masks, cand: int) -> int:
    """Greedy clique cover of ``cand``; its size bounds the MIS of ``cand``."""
    count = 0
    while cand:
        common = cand
        while common:
            w = _lowbit(common)
            common &= masks[w]
            cand &= ~(1 << w)
        count += 1
    return count


def max_independent_set(graph: Graph, limit: int = ENUMERATION_LIMIT) -> frozenset:
    """Maximum independent set by branch and bound with a clique-cover bound."""
    check_limit(graph, limit, "branch-and-bound")
    masks = graph.adjacency_masks()
    best = [0, 0]  # size, mask

    def rec(cand: int, cur: int, size: int):
        # free picks: vertices with at most one candidate neighbor are simplicial
        changed = True
        while changed and cand:
            changed = False
            c = cand
            while c:
                v = _lowbit(c)
                c &= c - 1
                nb = masks[v] & cand
                if nb & (nb - 1) == 0:
                    cur |= 1 << v
                    size += 1
                    cand &= ~(nb | (1 << v))
                    c &= cand
                    changed = True
        if not cand:
            if size > best[0]:
                best[0], best[1] = size, cur
            return
        if size + _clique_cover_size(masks, cand) <= best[0]:
            return
        # branch on the candidate of largest residual degree
        v, dv = -1, -1
        c = cand
        while c:
            u = _lowbit(c)
            c &= c - 1
            d = bin(masks[u] & cand).count("1")
            if d > dv:
                v, dv = u, d
        rec(cand & ~(masks[v] | (1 << v)), cur | (1 << v), size + 1)
        rec(cand & ~(1 << v), cur, size)

    rec((1 << graph.n) - 1, 0, 0)
    m = best[1]
    return frozenset(v for v in range(graph.n) if m >> v & 1)


def mis_size(graph: Graph, limit: int = ENUMERATION_LIMIT) -> int:
    return len(max_independent_set(graph, limit))


def _poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return out


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def independence_polynomial(graph: Graph, limit: int = ENUMERATION_LIMIT) -> list[int]:
    """Coefficients ``c[k]`` = number of independent sets of size ``k``.

    Uses I(G) = I(G - v) + x I(G - N[v]) on the lowest-id vertex, memoized
    on the residual vertex mask and split over connected components.  With
    row-major lattice numbering the residual masks only differ along a
    sweep frontier, which keeps the memo small.
    """
    check_limit(graph, limit, "counting")
    masks = graph.adjacency_masks()
    memo = {0: (1,)}

    def component(mask: int) -> int:
        seen = 1 << _lowbit(mask)
        frontier = seen
        while frontier:
            v = _lowbit(frontier)
            frontier &= frontier - 1
            new = masks[v] & mask & ~seen
            seen |= new
            frontier |= new
        return seen

    def poly(mask: int):
        hit = memo.get(mask)
        if hit is not None:
            return hit
        comp = component(mask)
        if comp != mask:
            res = tuple(_poly_mul(poly(comp), poly(mask & ~comp)))
        else:
            v = _lowbit(mask)
            without = poly(mask & ~(1 << v))
            with_v = poly(mask & ~(masks[v] | (1 << v)))
            res = tuple(_poly_add(without, [0] + list(with_v)))
        memo[mask] = res
        return res

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * graph.n + 1000))
    try:
        return list(poly((1 << graph.n) - 1))
    finally:
        sys.setrecursionlimit(old)


def count_independent_sets(graph: Graph, size: int, limit: int = ENUMERATION_LIMIT) -> int:
    if size < 0:
        return 0
    coeffs = independence_polynomial(graph, limit)
    return coeffs[size] if size < len(coeffs) else 0


def enumerate_independent_sets(graph: Graph, min_size: int,
                               limit: int = ENUMERATION_LIMIT) -> list[frozenset]:
    """All independent sets with at least ``min_size`` members, in a fixed order."""
    check_limit(graph, limit)
    masks = graph.adjacency_masks()
    out = []

    def rec(cand: int, cur: list):
        if not cand:
            if len(cur) >= min_size:
                out.append(frozenset(cur))
            return
        if len(cur) + _clique_cover_size(masks, cand) < min_size:
            return
        v = _lowbit(cand)
        cur.append(v)
        rec(cand & ~(masks[v] | (1 << v)), cur)
        cur.pop()
        rec(cand & ~(1 << v), cur)

    rec((1 << graph.n) - 1, [])
    return out

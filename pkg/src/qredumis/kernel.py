"""Exact kernelization by simplicial (isolated) vertex removal.

A vertex whose closed neighborhood is a clique lies in some maximum
independent set, so it can be taken and its neighbors discarded without
losing optimality.  Repeating this until no such vertex is left yields an
irreducible kernel.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .graph import Graph, is_independent


@dataclass(frozen=True)
class ReductionStep:
    selected: int
    removed: frozenset


@dataclass(frozen=True)
class ReductionTrace:
    """Reduction steps in application order, in the ids of the reduced graph."""

    steps: tuple = ()

    @property
    def selected(self) -> frozenset:
        return frozenset(s.selected for s in self.steps)

    @property
    def removed(self) -> frozenset:
        out = set()
        for s in self.steps:
            out |= s.removed
        return frozenset(out)

    def to_dict(self) -> dict:
        return {"steps": [{"selected": s.selected, "removed": sorted(s.removed)}
                          for s in self.steps],
                "selected": sorted(self.selected), "removed": sorted(self.removed)}

    @classmethod
    def from_dict(cls, doc: dict) -> "ReductionTrace":
        return cls(tuple(ReductionStep(int(s["selected"]), frozenset(s["removed"]))
                         for s in doc["steps"]))


@dataclass(frozen=True)
class Kernel:
    graph: Graph
    irreducible: bool = True
    # local kernel id -> id in the graph that was reduced
    parent_ids: tuple = field(default=())


def _is_simplicial(adj, v) -> bool:
    nbrs = adj[v]
    for u in nbrs:
        # u must see v and every other neighbor of v
        if len(adj[u]) < len(nbrs):
            return False
        for w in nbrs:
            if w != u and w not in adj[u]:
                return False
    return True


def find_simplicial_vertex(graph: Graph):
    """Smallest vertex whose closed neighborhood is a clique, else ``None``."""
    adj = [graph.neighbors(v) for v in range(graph.n)]
    for v in range(graph.n):
        if _is_simplicial(adj, v):
            return v
    return None


def classical_reduce(graph: Graph) -> tuple[Kernel, ReductionTrace]:
    """Exhaustively remove simplicial vertices, smallest id first.

    Only vertices whose neighborhood changed are re-examined, so a full
    reduction costs O(sum of deg^2) on sparse inputs.
    """
    adj = {v: set(graph.neighbors(v)) for v in range(graph.n)}
    dirty = list(range(graph.n))
    heapq.heapify(dirty)
    queued = set(dirty)
    steps = []
    while dirty:
        v = heapq.heappop(dirty)
        queued.discard(v)
        if v not in adj or not _is_simplicial(adj, v):
            continue
        removed = frozenset(adj[v])
        touched = set()
        for u in removed:
            touched |= adj[u]
        gone = removed | {v}
        for x in gone:
            for y in adj[x]:
                if y not in gone:
                    adj[y].discard(x)
            del adj[x]
        steps.append(ReductionStep(v, removed))
        for w in touched - gone:
            if w not in queued:
                queued.add(w)
                heapq.heappush(dirty, w)
    survivors = sorted(adj)
    kgraph = graph.induced_subgraph(survivors)
    return Kernel(kgraph, True, tuple(survivors)), ReductionTrace(tuple(steps))


def reconstruct(trace: ReductionTrace, kernel: Kernel, kernel_solution) -> frozenset:
    """Lift an independent set of the kernel back to the reduced graph."""
    sol = set(kernel_solution)
    if not is_independent(kernel.graph, sol):
        raise ValueError("kernel solution is not independent in the kernel")
    return trace.selected | frozenset(kernel.parent_ids[v] for v in sol)


def replay_trace(graph: Graph, trace: ReductionTrace) -> bool:
    """Check that each step selected a simplicial vertex of the then-current graph."""
    alive = set(range(graph.n))
    for step in trace.steps:
        if step.selected not in alive:
            return False
        nbrs = {w for w in graph.neighbors(step.selected) if w in alive}
        if nbrs != set(step.removed):
            return False
        for u in nbrs:
            for w in nbrs:
                if u < w and not graph.has_edge(u, w):
                    return False
        alive -= nbrs | {step.selected}
    return True

"""Graph container, instance generators and independence checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

# relative slack on distance comparisons so sqrt(2)*a never flickers
DISTANCE_RTOL = 1e-9
# union-jack connectivity: blockade radius in units of the lattice spacing
UNION_JACK_RADIUS_RATIO = 1.5
DEFAULT_LATTICE_SPACING = 5.45  # micrometers


class GraphError(ValueError):
    pass


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    ``coords`` holds 2D positions in micrometers (unit-disk provenance) and
    ``labels`` maps local ids back to the ids of the graph this one was cut
    from.  Instances are immutable; adjacency is built once on construction.
    """

    n: int
    edges: frozenset = frozenset()
    coords: tuple | None = None
    labels: tuple | None = None
    meta: Mapping = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be non-negative")
        norm = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {(u, v)} out of range for n={self.n}")
            norm.add(_norm_edge(u, v))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.coords is not None:
            coords = tuple((float(x), float(y)) for x, y in self.coords)
            if len(coords) != self.n:
                raise GraphError("coords length must equal vertex count")
            object.__setattr__(self, "coords", coords)
        if self.labels is not None:
            labels = tuple(int(x) for x in self.labels)
            if len(labels) != self.n:
                raise GraphError("labels length must equal vertex count")
            if len(set(labels)) != len(labels):
                raise GraphError("labels must be unique")
            object.__setattr__(self, "labels", labels)
        adj = [set() for _ in range(self.n)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], **kw) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges), **kw)

    # -- queries -----------------------------------------------------------
    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def label(self, v: int) -> int:
        return v if self.labels is None else self.labels[v]

    def to_original(self, vertices: Iterable[int]) -> frozenset:
        """Map local vertex ids to the ids stored in ``labels``."""
        if self.labels is None:
            return frozenset(vertices)
        return frozenset(self.labels[v] for v in vertices)

    def induced_subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Subgraph on ``vertices`` (renumbered in increasing order).

        Labels of the result point at this graph's own labels, so chained
        extraction always resolves to the root graph.
        """
        keep = sorted(set(vertices))
        for v in keep:
            if not 0 <= v < self.n:
                raise GraphError(f"vertex {v} out of range")
        index = {v: i for i, v in enumerate(keep)}
        edges = set()
        for v in keep:
            for w in self._adj[v]:
                if w in index and v < w:
                    edges.add((index[v], index[w]))
        coords = None if self.coords is None else tuple(self.coords[v] for v in keep)
        return Graph(len(keep), frozenset(edges), coords=coords,
                     labels=tuple(self.label(v) for v in keep), meta=dict(self.meta))

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest id."""
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self._adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            out.append(sorted(comp))
        return out

    def adjacency_masks(self) -> list[int]:
        """Neighborhoods as integer bitmasks (bit v set for each neighbor v)."""
        masks = []
        for v in range(self.n):
            m = 0
            for w in self._adj[v]:
                m |= 1 << w
            masks.append(m)
        return masks


def is_independent(graph: Graph, candidate: Iterable[int]) -> bool:
    members = set(candidate)
    for v in members:
        if not 0 <= v < graph.n:
            raise GraphError(f"vertex {v} out of range for n={graph.n}")
    for v in members:
        if not graph.neighbors(v).isdisjoint(members):
            return False
    return True


# -- generators -------------------------------------------------------------

def build_unit_disk_graph(coords, radius: float, **kw) -> Graph:
    """Connect every pair of points at distance <= ``radius`` (inclusive)."""
    if radius <= 0:
        raise GraphError("radius must be positive")
    pts = np.asarray(coords, dtype=float).reshape(-1, 2)
    n = len(pts)
    edges = set()
    if n > 1:
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff ** 2).sum(-1))
        iu, ju = np.nonzero(np.triu(dist <= radius * (1 + DISTANCE_RTOL), k=1))
        edges = set(zip(iu.tolist(), ju.tolist()))
    return Graph(n, frozenset(edges), coords=tuple(map(tuple, pts.tolist())), **kw)


@dataclass(frozen=True)
class UnionJackSpec:
    side_length: int
    target_vertex_count: int | None = None
    keep_probability: float | None = None
    lattice_spacing: float = DEFAULT_LATTICE_SPACING
    seed: int = 0

    def __post_init__(self):
        if self.side_length < 1:
            raise GraphError("side length must be >= 1")
        if (self.target_vertex_count is None) == (self.keep_probability is None):
            raise GraphError("give exactly one of target_vertex_count / keep_probability")
        if self.target_vertex_count is not None:
            if not 0 <= self.target_vertex_count <= self.side_length ** 2:
                raise GraphError(
                    f"target vertex count {self.target_vertex_count} exceeds "
                    f"L^2 = {self.side_length ** 2}")
        elif not 0 < self.keep_probability <= 1:
            raise GraphError("keep probability must lie in (0, 1]")
        if self.lattice_spacing <= 0:
            raise GraphError("lattice spacing must be positive")

    def to_dict(self) -> dict:
        d = {"kind": "union-jack", "side_length": self.side_length,
             "lattice_spacing": self.lattice_spacing, "seed": self.seed}
        if self.target_vertex_count is not None:
            d["target_vertex_count"] = self.target_vertex_count
        else:
            d["keep_probability"] = self.keep_probability
        return d


def generate_union_jack(spec: UnionJackSpec) -> Graph:
    """Site-diluted square lattice with nearest and diagonal neighbors joined.

    Sites are numbered row-major; the surviving sites keep that order.
    """
    L, a = spec.side_length, spec.lattice_spacing
    rng = np.random.default_rng(spec.seed)
    if spec.target_vertex_count is not None:
        sites = np.sort(rng.choice(L * L, size=spec.target_vertex_count, replace=False))
    else:
        sites = np.flatnonzero(rng.random(L * L) < spec.keep_probability)
    coords = [((s % L) * a, (s // L) * a) for s in sites.tolist()]
    return build_unit_disk_graph(coords, UNION_JACK_RADIUS_RATIO * a,
                                 meta={"seed": spec.seed, "spec": spec.to_dict()})


@dataclass(frozen=True)
class AssetGraphSpec:
    correlations: np.ndarray
    threshold: float
    # expected returns only matter for the weighted problem
    expected_returns: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.correlations, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise GraphError("correlation matrix must be square")
        if not np.allclose(c, c.T, atol=1e-12, rtol=0):
            raise GraphError("correlation matrix must be symmetric")
        if np.any(np.abs(c) > 1 + 1e-12):
            raise GraphError("correlations must lie in [-1, 1]")
        if not 0 <= self.threshold <= 1:
            raise GraphError("threshold must lie in [0, 1]")
        object.__setattr__(self, "correlations", c)


def build_asset_graph(spec: AssetGraphSpec) -> Graph:
    c = spec.correlations
    n = c.shape[0]
    iu, ju = np.nonzero(np.triu(np.abs(c) >= spec.threshold, k=1))
    return Graph(n, frozenset(zip(iu.tolist(), ju.tolist())),
                 meta={"spec": {"kind": "asset", "threshold": spec.threshold}})


# -- small named graphs used throughout the tests and examples --------------

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_graph(n: int, density: float, seed) -> Graph:
    """Erdos-Renyi G(n, p) drawn from a numpy generator seeded with ``seed``."""
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < density
    return Graph.from_edges(n, zip(iu[mask].tolist(), ju[mask].tolist()))


def pairwise_distance(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])

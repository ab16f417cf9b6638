"""Frozen-vertex selection from sample histograms.

In-set nodes are the kernel vertices that show up most often in the
filtered samples, out-set nodes the ones that show up least.  A restricted
candidate list (RCL) of the top ``K_RCL`` vertices is built and ``lambda``
of them are drawn uniformly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .sampling import SampleSet, child_seed

STRATEGIES = ("in", "out", "random")


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class SelectionParams:
    size: int = 1
    rcl_size: int | None = None
    rcl_fraction: float | None = 0.4
    strategy: str = "in"
    degree_bias: bool = True

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise SelectionError(f"unknown strategy {self.strategy!r}")
        if self.size < 1:
            raise SelectionError("selection size must be >= 1")
        if self.rcl_size is not None and self.rcl_size < self.size:
            raise SelectionError("RCL size must be at least the selection size")
        if self.rcl_size is None and not (self.rcl_fraction and 0 < self.rcl_fraction <= 1):
            raise SelectionError("need an RCL size or a fraction in (0, 1]")

    def rcl_for(self, kernel_size: int) -> int:
        """Effective RCL length for a kernel: fractions round up, never below ``size``."""
        if self.rcl_size is not None:
            k = self.rcl_size
        else:
            k = math.ceil(self.rcl_fraction * kernel_size - 1e-12)
        return max(1, self.size, min(k, kernel_size))

    def to_dict(self) -> dict:
        return {"size": self.size, "rcl_size": self.rcl_size,
                "rcl_fraction": self.rcl_fraction, "strategy": self.strategy,
                "degree_bias": self.degree_bias}


@dataclass(frozen=True)
class CountHistogram:
    counts: np.ndarray
    shots_used: int


@dataclass(frozen=True)
class Selection:
    removed_all: frozenset  # Q
    selected: frozenset  # s_q
    removed: frozenset  # r_q
    rcl: tuple = ()

    def to_dict(self) -> dict:
        return {"Q": sorted(self.removed_all), "s_q": sorted(self.selected),
                "r_q": sorted(self.removed), "rcl": list(self.rcl)}


def filter_shots(samples: SampleSet) -> SampleSet:
    """Keep the shots whose repaired set has the largest or second-largest size present."""
    sets = samples.repaired_sets
    if not sets:
        raise SelectionError("no valid shots to filter")
    sizes = sorted({len(s) for s in sets}, reverse=True)[:2]
    keep = np.array([len(s) in sizes for s in sets])
    valid_rows = np.flatnonzero(samples.valid)[keep]
    return SampleSet(samples.bitstrings[valid_rows], np.ones(len(valid_rows), dtype=bool),
                     tuple(s for s, k in zip(sets, keep) if k), dict(samples.meta))


def build_histogram(samples: SampleSet, kernel: Graph) -> CountHistogram:
    counts = np.zeros(kernel.n, dtype=np.int64)
    for s in samples.repaired_sets:
        for v in s:
            counts[v] += 1
    return CountHistogram(counts, len(samples.repaired_sets))


def restricted_candidates(hist: CountHistogram, kernel: Graph, params: SelectionParams,
                          vertices=None) -> list[int]:
    verts = range(kernel.n) if vertices is None else vertices
    if params.strategy == "in":
        bias = (lambda v: kernel.degree(v)) if params.degree_bias else (lambda v: 0)
        key = lambda v: (-int(hist.counts[v]), bias(v), v)
    elif params.strategy == "out":
        key = lambda v: (int(hist.counts[v]), -kernel.degree(v), v)
    else:
        return sorted(verts)
    ranked = sorted(verts, key=key)
    return ranked[:params.rcl_for(len(ranked))]


def _draw(rcl, kernel: Graph, size: int, independent: bool, rng) -> list[int]:
    pool = list(rcl)
    drawn = []
    while len(drawn) < size and pool:
        v = pool.pop(int(rng.integers(len(pool))))
        # selected nodes join the global solution, so they must stay independent
        if independent and any(kernel.has_edge(v, u) for u in drawn):
            continue
        drawn.append(v)
    return drawn


def select(samples: SampleSet | None, kernel: Graph, params: SelectionParams, seed=None,
           vertices=None) -> Selection:
    """Pick frozen vertices; returns (Q, s_q, r_q) as a :class:`Selection`.

    ``samples`` may be ``None`` for the random strategy.  ``vertices``
    restricts the choice to a subset of the kernel (one component, say).
    """
    n_avail = kernel.n if vertices is None else len(vertices)
    if n_avail == 0:
        raise SelectionError("cannot select from an empty kernel")
    if params.size > n_avail:
        raise SelectionError(f"selection size {params.size} exceeds kernel size {n_avail}")
    rng = np.random.default_rng(seed)
    if params.strategy == "random":
        hist = CountHistogram(np.zeros(kernel.n, dtype=np.int64), 0)
    else:
        if samples is None:
            raise SelectionError(f"strategy {params.strategy!r} needs samples")
        hist = build_histogram(samples, kernel)
    rcl = restricted_candidates(hist, kernel, params, vertices)
    if params.strategy == "out":
        drawn = _draw(rcl, kernel, params.size, False, rng)
        r_q = frozenset(drawn)
        return Selection(r_q, frozenset(), r_q, tuple(rcl))
    drawn = _draw(rcl, kernel, params.size, True, rng)
    s_q = frozenset(drawn)
    r_q = set()
    for v in drawn:
        r_q |= kernel.neighbors(v)
    r_q = frozenset(r_q - s_q)
    return Selection(s_q | r_q, s_q, r_q, tuple(rcl))


def select_per_component(samples, kernel: Graph, params: SelectionParams, seed=None) -> Selection:
    """Run :func:`select` independently on every connected component of the kernel."""
    Q, s_q, r_q, rcl = set(), set(), set(), []
    for i, comp in enumerate(kernel.components()):
        sub = child_seed(seed if seed is not None else 0, i)
        p = params
        if params.size > len(comp):
            p = SelectionParams(len(comp), None, params.rcl_fraction or 1.0,
                                params.strategy, params.degree_bias)
        sel = select(samples, kernel, p, sub, vertices=comp)
        Q |= sel.removed_all
        s_q |= sel.selected
        r_q |= sel.removed
        rcl.extend(sel.rcl)
    return Selection(frozenset(Q), frozenset(s_q), frozenset(r_q), tuple(rcl))

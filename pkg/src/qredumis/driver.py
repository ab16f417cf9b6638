"""The reduce / sample / select loop and its quantum-frugal variant."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, is_independent
from .kernel import classical_reduce
from .sampling import SamplerError, as_seed_sequence, child_seed, sample
from .selection import (Selection, SelectionParams, build_histogram, filter_shots,
                        restricted_candidates, select, select_per_component)


class SolveError(RuntimeError):
    """A failure inside the loop; ``report`` holds everything done up to that point."""

    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


@dataclass
class IterationRecord:
    graph_size: int
    reduced_selected: frozenset
    reduced_removed: frozenset
    kernel: frozenset
    best_sample_size: int | None = None
    valid_shots: int | None = None
    selection: Selection | None = None

    @property
    def kernel_size(self) -> int:
        return len(self.kernel)

    def to_dict(self) -> dict:
        return {"graph_size": self.graph_size, "kernel_size": self.kernel_size,
                "reduced_selected": sorted(self.reduced_selected),
                "reduced_removed": sorted(self.reduced_removed),
                "kernel": sorted(self.kernel), "best_sample_size": self.best_sample_size,
                "valid_shots": self.valid_shots,
                "selection": None if self.selection is None else self.selection.to_dict()}


@dataclass
class SolveReport:
    incumbent: frozenset = frozenset()
    selected: frozenset = frozenset()
    removed: frozenset = frozenset()
    iterations: int = 0
    sampler_calls: int = 0
    per_iteration: list = field(default_factory=list)
    seed: object = None
    solver: str = ""
    wall_time: float = 0.0

    @property
    def size(self) -> int:
        return len(self.incumbent)

    @property
    def first_reduction_size(self) -> int:
        if not self.per_iteration:
            return 0
        rec = self.per_iteration[0]
        return rec.graph_size - rec.kernel_size

    def to_dict(self, timings: bool = True) -> dict:
        doc = {"solver": self.solver, "size": self.size,
               "incumbent": sorted(self.incumbent), "selected": sorted(self.selected),
               "removed": sorted(self.removed), "iterations": self.iterations,
               "sampler_calls": self.sampler_calls, "seed": _seed_repr(self.seed),
               "per_iteration": [r.to_dict() for r in self.per_iteration]}
        if timings:
            doc["wall_time"] = self.wall_time
        return doc


def _seed_repr(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": seed.entropy, "spawn_key": list(seed.spawn_key)}
    return seed


def solver_label(strategy: str, frugal: bool = False) -> str:
    if strategy == "random":
        return "rReduMIS"
    return f"qReduMIS-{strategy}" + ("-frugal" if frugal else "")


def _iteration_seeds(master: np.random.SeedSequence, k: int):
    return child_seed(master, k, 0), child_seed(master, k, 1)


def _frugal_choice(samples, kernel: Graph, params: SelectionParams) -> Selection:
    """Trial every RCL candidate classically and keep the largest reduction footprint."""
    hist = build_histogram(samples, kernel)
    rcl = restricted_candidates(hist, kernel, params)
    best, best_gain = None, -1
    for v in sorted(rcl):
        if params.strategy == "out":
            q = {v}
        else:
            q = {v} | kernel.neighbors(v)
        rest = kernel.induced_subgraph(set(range(kernel.n)) - q)
        k2, _ = classical_reduce(rest)
        gain = kernel.n - k2.graph.n
        if gain > best_gain:
            best, best_gain = v, gain
    if params.strategy == "out":
        return Selection(frozenset({best}), frozenset(), frozenset({best}), tuple(rcl))
    r_q = frozenset(kernel.neighbors(best))
    return Selection(r_q | {best}, frozenset({best}), r_q, tuple(rcl))


def qredumis_solve(graph: Graph, backend: str = "exact", params: SelectionParams | None = None,
                   n_shots: int = 1000, seed=0, max_iterations: int | None = None,
                   backend_params: dict | None = None, per_component: bool = False,
                   frugal: bool = False) -> SolveReport:
    """Alternate exact kernelization with sampler-informed selection until the kernel is empty.

    The incumbent is refreshed from every sampler call as
    ``S + best filtered sample``; ``max_iterations`` caps the number of
    reductions and returns the incumbent at that point.
    """
    params = params or SelectionParams()
    if frugal and params.strategy == "random":
        raise ValueError("the frugal variant needs sampler counts (strategy in/out)")
    master = as_seed_sequence(seed)
    report = SolveReport(seed=seed, solver=solver_label(params.strategy, frugal))
    t0 = time.perf_counter()
    # drop foreign labels so every subgraph label is a vertex id of ``graph``
    current = Graph(graph.n, graph.edges, coords=graph.coords)
    S, R, W = set(), set(), frozenset()
    try:
        while True:
            if max_iterations is not None and report.iterations >= max_iterations:
                break
            report.iterations += 1
            kernel, trace = classical_reduce(current)
            K = kernel.graph
            rec = IterationRecord(current.n, current.to_original(trace.selected),
                                  current.to_original(trace.removed),
                                  K.to_original(range(K.n)))
            report.per_iteration.append(rec)
            S |= rec.reduced_selected
            R |= rec.reduced_removed
            if K.n == 0:
                if len(S) > len(W):
                    W = frozenset(S)
                break
            sampler_seed, select_seed = _iteration_seeds(master, report.iterations)
            # rReduMIS samples too: identical budgets, only the selection differs
            shots = sample(K, n_shots, sampler_seed, backend, backend_params)
            report.sampler_calls += 1
            rec.valid_shots = len(shots.repaired_sets)
            if not shots.repaired_sets:
                raise SamplerError("no valid shots left after post-selection")
            filtered = filter_shots(shots)
            best = max(filtered.repaired_sets, key=len)
            rec.best_sample_size = len(best)
            if len(S) + len(best) > len(W):
                cand = frozenset(S) | K.to_original(best)
                if not is_independent(graph, cand):
                    raise AssertionError("incumbent lost independence")
                W = cand
            if frugal:
                sel = _frugal_choice(filtered, K, params)
            elif per_component:
                sel = select_per_component(filtered, K, params, select_seed)
            else:
                sel = select(filtered, K, params, select_seed)
            rec.selection = Selection(K.to_original(sel.removed_all), K.to_original(sel.selected),
                                      K.to_original(sel.removed), tuple(K.label(v) for v in sel.rcl))
            S |= rec.selection.selected
            R |= rec.selection.removed
            current = K.induced_subgraph(set(range(K.n)) - sel.removed_all)
    except Exception as exc:
        report.incumbent, report.selected, report.removed = W, frozenset(S), frozenset(R)
        report.wall_time = time.perf_counter() - t0
        raise SolveError(f"solve failed in iteration {report.iterations}: {exc}", report) from exc
    report.incumbent, report.selected, report.removed = W, frozenset(S), frozenset(R)
    report.wall_time = time.perf_counter() - t0
    return report


def qredumis_frugal_solve(graph: Graph, backend: str = "exact",
                          params: SelectionParams | None = None, **kw) -> SolveReport:
    return qredumis_solve(graph, backend, params, frugal=True, **kw)


@dataclass(frozen=True)
class RunTimeModel:
    tau: float
    n_shots: int
    iterations: int

    def __post_init__(self):
        if self.tau <= 0 or self.n_shots <= 0 or self.iterations <= 0:
            raise ValueError("run-time model fields must be positive")


def estimate_runtime(model: RunTimeModel) -> float:
    """Wall-clock estimate D * n_shots * tau in seconds (classical time neglected)."""
    return model.iterations * model.n_shots * model.tau


def _solve_one(args):
    graph, kw = args
    return qredumis_solve(graph, **kw)


def run_repetitions(graph: Graph, backend: str = "exact", params: SelectionParams | None = None,
                    repetitions: int = 20, seed=0, workers: int = 1, **kw) -> list[SolveReport]:
    """``repetitions`` independent solves; child seeds are spawned from ``seed``."""
    if repetitions < 1:
        raise ValueError("need at least one repetition")
    seeds = [child_seed(seed, r) for r in range(repetitions)]
    jobs = [(graph, dict(kw, backend=backend, params=params, seed=s)) for s in seeds]
    if workers <= 1:
        return [_solve_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_one, jobs))


def bare_sampler_sizes(graph: Graph, backend: str = "sa", n_shots: int = 1000, seed=0,
                       backend_params: dict | None = None) -> list[int]:
    """Sizes of the repaired shots of a single sampler call on the whole graph."""
    shots = sample(graph, n_shots, seed, backend, backend_params)
    return [len(s) for s in shots.repaired_sets]

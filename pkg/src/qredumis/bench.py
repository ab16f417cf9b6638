"""Benchmark harness: (instance x solver) cells, P_MIS estimates and CSV output.

Every cell gets a seed derived from (master seed, instance index, solver
index), so results do not depend on the worker count or on completion order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .driver import qredumis_solve, solver_label
from .exact import ENUMERATION_LIMIT
from .graph import Graph, UnionJackSpec, generate_union_jack
from .graphio import read_graph
from .kernel import classical_reduce
from .metrics import estimate_success, hardness
from .sampling import SAMPLERS, child_seed, sample
from .selection import STRATEGIES, SelectionParams

CSV_COLUMNS = ("instance", "n", "H", "solver", "p_mis", "ci_low", "ci_high",
               "mean_D", "mean_sampler_calls")
CALLS_COLUMNS = ("instance", "solver", "repetition", "qpu_calls", "first_reduction_size")
SCHEMA_VERSION = 1


class MissingOptimumError(ValueError):
    pass


@dataclass
class SolverConfig:
    kind: str = "qredumis"  # or "bare"
    backend: str = "sa"
    strategy: str = "in"
    frugal: bool = False
    selection: dict = field(default_factory=dict)
    backend_params: dict = field(default_factory=dict)
    name: str | None = None

    def __post_init__(self):
        if self.kind not in ("qredumis", "bare"):
            raise ValueError(f"unknown solver kind {self.kind!r}")
        if self.backend not in SAMPLERS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "bare":
            return f"bare-{self.backend}"
        return solver_label(self.strategy, self.frugal)

    def params(self) -> SelectionParams:
        return SelectionParams(strategy=self.strategy, **self.selection)


@dataclass
class BenchConfig:
    instances: list
    solvers: list
    repetitions: int = 20
    n_shots: int = 1000
    seed: int = 0
    workers: int = 1
    bootstrap_samples: int = 10000
    output_dir: str | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchConfig":
        doc = dict(doc)
        doc["solvers"] = [s if isinstance(s, SolverConfig) else SolverConfig(**s)
                          for s in doc.get("solvers", [])]
        return cls(**doc)

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k not in ("workers", "output_dir")}
        out["solvers"] = [dict(s.__dict__) for s in self.solvers]
        return out

    def __post_init__(self):
        if not self.instances or not self.solvers:
            raise ValueError("bench needs at least one instance and one solver")
        if self.repetitions < 1 or self.n_shots < 1:
            raise ValueError("repetitions and n_shots must be positive")


@dataclass(frozen=True)
class Instance:
    name: str
    graph: Graph
    optimum: int
    H: float


def load_instance(entry, limit: int = ENUMERATION_LIMIT) -> Instance:
    """An entry is a path, or a dict with ``path`` or a union-jack ``side``/``nodes``/``seed``."""
    if isinstance(entry, (str, Path)):
        entry = {"path": str(entry)}
    known = entry.get("known_optimum")
    if "path" in entry:
        g = read_graph(entry["path"])
        name = entry.get("id", Path(entry["path"]).stem)
    else:
        spec = UnionJackSpec(entry["side"], entry["nodes"],
                             lattice_spacing=entry.get("spacing", 5.45), seed=entry["seed"])
        g = generate_union_jack(spec)
        name = entry.get("id", f"uj-L{spec.side_length}-n{g.n}-s{spec.seed}")
    if g.n <= limit:
        rep = hardness(g, limit)
        if known is not None and known != rep.mis_size:
            raise ValueError(f"{name}: known optimum {known} disagrees with oracle {rep.mis_size}")
        return Instance(name, g, rep.mis_size, rep.hardness)
    if known is None:
        raise MissingOptimumError(f"{name} has {g.n} vertices, above the oracle limit {limit}; "
                                  "supply a known optimum")
    return Instance(name, g, int(known), math.nan)


def desk_testbed(count: int = 15, seed: int = 0, side: int = 8, nodes: int = 40,
                 min_kernel: int = 18, scan: int = 3000) -> list[dict]:
    """Union-jack instances whose kernel is non-trivial, spread evenly over hardness.

    Most small union-jack graphs reduce completely, which would leave the
    samplers nothing to do, so only instances with a kernel of at least
    ``min_kernel`` vertices are kept.
    """
    found = []
    for s in range(seed, seed + scan):
        g = generate_union_jack(UnionJackSpec(side, nodes, seed=s))
        k, _ = classical_reduce(g)
        if k.graph.n >= min_kernel:
            found.append((hardness(g).hardness, s))
    if len(found) < count:
        raise ValueError(f"only {len(found)} instances with kernel >= {min_kernel}")
    found.sort()
    picks = np.linspace(0, len(found) - 1, count).round().astype(int)
    return [{"side": side, "nodes": nodes, "seed": found[i][1]} for i in picks]


@dataclass
class CellResult:
    instance: int
    solver: int
    successes: list
    iterations: list
    calls: list
    first_reduction: list


def _run_cell(job) -> CellResult:
    i, j, inst, solver, reps, n_shots, master = job
    cell_seed = child_seed(master, i, j)
    succ, iters, calls, first = [], [], [], []
    for r in range(reps):
        s = child_seed(cell_seed, r)
        if solver.kind == "bare":
            # a bare sampler succeeds per shot
            shots = sample(inst.graph, n_shots, s, solver.backend, solver.backend_params)
            succ.extend(len(x) == inst.optimum for x in shots.repaired_sets)
            iters.append(1)
            calls.append(1)
            first.append(0)
        else:
            rep = qredumis_solve(inst.graph, solver.backend, solver.params(), n_shots, s,
                                 backend_params=solver.backend_params, frugal=solver.frugal)
            succ.append(rep.size == inst.optimum)
            iters.append(rep.iterations)
            calls.append(rep.sampler_calls)
            first.append(rep.first_reduction_size)
    return CellResult(i, j, succ, iters, calls, first)


def _fmt(x) -> str:
    if isinstance(x, float):
        return "" if math.isnan(x) else format(x, ".10g")
    return str(x)


@dataclass
class BenchResult:
    rows: list
    calls: list
    summary: dict

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    def calls_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CALLS_COLUMNS)
        for row in self.calls:
            w.writerow([_fmt(row[c]) for c in CALLS_COLUMNS])
        return buf.getvalue()

    def write(self, out_dir) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"results": out / "results.csv", "calls": out / "calls.csv",
                 "summary": out / "summary.json"}
        paths["results"].write_text(self.csv_text())
        paths["calls"].write_text(self.calls_text())
        paths["summary"].write_text(json.dumps(self.summary, indent=2, sort_keys=True) + "\n")
        return paths


def hard_tercile(rows, solvers, bootstrap_samples: int = 10000, seed=0,
                 level: float = 0.9) -> dict:
    """Mean p_mis per solver over the hardest third of the instances (by H).

    The interval resamples every instance's runs independently and averages
    the resampled success fractions.
    """
    hs = sorted({(r["H"], r["instance"]) for r in rows}, key=lambda t: t[0])
    k = max(1, math.ceil(len(hs) / 3))
    hard = {name for _, name in hs[-k:]}
    out = {}
    for j, label in enumerate(solvers):
        sel = [r for r in rows if r["solver"] == label and r["instance"] in hard]
        rng = np.random.default_rng(child_seed(seed, j))
        boot = np.mean([rng.binomial(r["n_runs"], r["p_mis"], bootstrap_samples) / r["n_runs"]
                        for r in sel], axis=0)
        mean = float(np.mean([r["p_mis"] for r in sel]))
        a = (1 - level) / 2
        lo, hi = np.quantile(boot, [a, 1 - a])
        out[label] = {"mean": mean, "ci_low": float(min(lo, mean)),
                      "ci_high": float(max(hi, mean)), "instances": len(sel)}
    return out


def run_bench(config: BenchConfig) -> BenchResult:
    instances = [load_instance(e) for e in config.instances]
    master = child_seed(config.seed)
    jobs = [(i, j, inst, sv, config.repetitions, config.n_shots, master)
            for i, inst in enumerate(instances) for j, sv in enumerate(config.solvers)]
    if config.workers <= 1:
        cells = [_run_cell(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            cells = list(pool.map(_run_cell, jobs))
    rows, calls = [], []
    for c in cells:
        inst, sv = instances[c.instance], config.solvers[c.solver]
        est = estimate_success(c.successes, config.bootstrap_samples,
                               child_seed(master, c.instance, c.solver, 1 << 20))
        rows.append({"instance": inst.name, "n": inst.graph.n, "H": inst.H,
                     "solver": sv.label, "p_mis": est.p_mis, "ci_low": est.ci_low,
                     "ci_high": est.ci_high, "mean_D": float(np.mean(c.iterations)),
                     "mean_sampler_calls": float(np.mean(c.calls)), "n_runs": est.n_runs,
                     "_order": (c.instance, c.solver)})
        if sv.kind != "bare":
            for r, (q, f) in enumerate(zip(c.calls, c.first_reduction)):
                calls.append({"instance": inst.name, "solver": sv.label, "repetition": r,
                              "qpu_calls": q, "first_reduction_size": f})
    rows.sort(key=lambda r: (math.inf if math.isnan(r["H"]) else r["H"], r["_order"]))
    for r in rows:
        del r["_order"]
    labels = [s.label for s in config.solvers]
    summary = {"schema": SCHEMA_VERSION, "config": config.to_dict(),
               "instances": [{"instance": x.name, "n": x.graph.n, "H": None if math.isnan(x.H)
                              else x.H, "optimum": x.optimum} for x in instances],
               "rows": [{k: (None if isinstance(v, float) and math.isnan(v) else v)
                         for k, v in r.items()} for r in rows]}
    if all(not math.isnan(x.H) for x in instances):
        summary["hard_tercile"] = hard_tercile(rows, labels, config.bootstrap_samples,
                                               child_seed(master, 1 << 21))
    return BenchResult(rows, calls, summary)

"""Command line entry point: generate | kernelize | solve | bench | hardness | fit."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bench import BenchConfig, desk_testbed, run_bench
from .driver import SolveError, qredumis_solve
from .graph import (AssetGraphSpec, GraphError, UnionJackSpec, build_asset_graph,
                    build_unit_disk_graph, generate_union_jack)
from .graphio import dumps_json, graph_to_dict, read_graph
from .kernel import classical_reduce
from .metrics import fit_scaling, hardness
from .sampling import SAMPLERS
from .selection import STRATEGIES, SelectionParams

OUTPUT_ENV = "QREDUMIS_OUTPUT_DIR"


def _emit(text: str, path: str | None, default_name: str | None = None):
    """Write to ``path``, else into $QREDUMIS_OUTPUT_DIR, else stdout."""
    if path is None and default_name and os.environ.get(OUTPUT_ENV):
        path = str(Path(os.environ[OUTPUT_ENV]) / default_name)
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)
    print(f"wrote {path}", file=sys.stderr)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def cmd_generate(args) -> int:
    if args.kind == "uj":
        spec = UnionJackSpec(args.side, args.nodes, args.keep_prob, args.spacing, args.seed)
        g = generate_union_jack(spec)
        name = f"uj-L{args.side}-n{g.n}-s{args.seed}.json"
    elif args.kind == "ud":
        rng = np.random.default_rng(args.seed)
        pts = rng.random((args.nodes, 2)) * args.box
        g = build_unit_disk_graph([tuple(p) for p in pts.tolist()], args.radius,
                                  meta={"seed": args.seed,
                                        "spec": {"kind": "unit-disk", "nodes": args.nodes,
                                                 "box": args.box, "radius": args.radius}})
        name = f"ud-n{args.nodes}-s{args.seed}.json"
    else:
        if args.correlations is None:
            raise GraphError("asset graphs need --correlations")
        corr = json.loads(Path(args.correlations).read_text())
        g = build_asset_graph(AssetGraphSpec(np.array(corr), args.threshold))
        name = f"asset-{Path(args.correlations).stem}.json"
    _emit(dumps_json(g), args.output, name)
    return 0


def cmd_kernelize(args) -> int:
    g = read_graph(args.instance)
    kernel, trace = classical_reduce(g)
    doc = {"n": g.n, "kernel_size": kernel.graph.n, "selected": sorted(trace.selected),
           "removed": sorted(trace.removed), "kernel": graph_to_dict(kernel.graph),
           "parent_ids": list(kernel.parent_ids), "trace": trace.to_dict()}
    _emit(_dump(doc), args.output, f"{Path(args.instance).stem}.kernel.json")
    return 0


def cmd_solve(args) -> int:
    g = read_graph(args.instance)
    params = SelectionParams(args.lam, args.rcl_size,
                             None if args.rcl_size else args.rcl_frac,
                             args.strategy, not args.no_degree_bias)
    bp = dict(kv.split("=", 1) for kv in args.backend_param)
    bp = {k: _value(v) for k, v in bp.items()}
    if args.epsilon:
        bp["epsilon"] = args.epsilon
    try:
        rep = qredumis_solve(g, args.backend, params, args.shots, args.seed,
                             args.max_iterations, bp, args.per_component, args.frugal)
    except SolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.output:
            _emit(_dump(exc.report.to_dict()), args.output)
        return 1
    doc = rep.to_dict()
    doc["backend"] = args.backend
    doc["params"] = params.to_dict()
    _emit(_dump(doc), args.output, f"{Path(args.instance).stem}.solve.json")
    if args.snapshots:
        lines = [json.dumps(dict(r.to_dict(), iteration=i + 1), sort_keys=True)
                 for i, r in enumerate(rep.per_iteration)]
        _emit("\n".join(lines) + "\n", args.snapshots)
    return 0


def cmd_bench(args) -> int:
    doc = json.loads(Path(args.config).read_text()) if args.config else {}
    if args.testbed:
        doc["instances"] = desk_testbed(args.testbed, seed=args.testbed_seed)
    if "solvers" not in doc:
        bp = {"sweeps_per_vertex": 1.0}
        doc["solvers"] = [{"kind": "bare", "backend": "sa", "backend_params": bp},
                          {"backend": "sa", "strategy": "random", "backend_params": bp},
                          {"backend": "sa", "strategy": "in", "backend_params": bp}]
    for key in ("repetitions", "n_shots", "workers", "seed"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    out = args.out or doc.get("output_dir") or os.environ.get(OUTPUT_ENV) or "bench-out"
    doc["output_dir"] = out
    if "instances" not in doc:
        raise ValueError("no instances: give a config with 'instances' or --testbed N")
    res = run_bench(BenchConfig.from_dict(doc))
    paths = res.write(out)
    for p in paths.values():
        print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_hardness(args) -> int:
    g = read_graph(args.instance)
    doc = dict(hardness(g, args.limit).to_dict(), n=g.n)
    _emit(_dump(doc), args.output)
    return 0


def cmd_fit(args) -> int:
    with open(args.results, newline="") as fh:
        rows = [r for r in csv.DictReader(fh) if not args.solver or r["solver"] == args.solver]
    pts = [(float(r["H"]), float(r["p_mis"])) for r in rows if r["H"]]
    fit = fit_scaling(pts)
    _emit(_dump({"solver": args.solver, "C": fit.C, "beta": fit.beta,
                 "residual": fit.residual, "used": fit.used, "excluded": fit.excluded}),
          args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qredumis", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-o", "--output", default=None)

    g = sub.add_parser("generate", help="write an instance file")
    common(g)
    g.add_argument("kind", choices=("uj", "ud", "asset"))
    g.add_argument("--side", type=int, default=8)
    g.add_argument("--nodes", type=int, default=None)
    g.add_argument("--keep-prob", type=float, default=None)
    g.add_argument("--spacing", type=float, default=5.45)
    g.add_argument("--box", type=float, default=1.0)
    g.add_argument("--radius", type=float, default=0.2)
    g.add_argument("--correlations", default=None, help="JSON square matrix")
    g.add_argument("--threshold", type=float, default=0.5)
    g.set_defaults(func=cmd_generate)

    k = sub.add_parser("kernelize", help="run the exact reductions")
    common(k)
    k.add_argument("instance")
    k.set_defaults(func=cmd_kernelize)

    s = sub.add_parser("solve", help="run the hybrid solver")
    common(s)
    s.add_argument("instance")
    s.add_argument("--backend", choices=sorted(SAMPLERS), default="exact")
    s.add_argument("--strategy", choices=STRATEGIES, default="in")
    s.add_argument("--lambda", dest="lam", type=int, default=1)
    s.add_argument("--rcl-frac", type=float, default=0.4)
    s.add_argument("--rcl-size", type=int, default=None)
    s.add_argument("--no-degree-bias", action="store_true")
    s.add_argument("--shots", type=int, default=1000)
    s.add_argument("--max-iterations", type=int, default=None)
    s.add_argument("--epsilon", type=float, default=0.0, help="atom loading error rate")
    s.add_argument("--backend-param", action="append", default=[], metavar="KEY=VALUE")
    s.add_argument("--frugal", action="store_true")
    s.add_argument("--per-component", action="store_true")
    s.add_argument("--snapshots", default=None, help="JSON-lines per-iteration records")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="P_MIS table over instances and solvers")
    b.add_argument("--config", default=None, help="JSON config; flags override it")
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--testbed", type=int, default=None, help="use N desk testbed instances")
    b.add_argument("--testbed-seed", type=int, default=0)
    b.add_argument("--repetitions", type=int, default=None)
    b.add_argument("--n-shots", type=int, default=None)
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)

    h = sub.add_parser("hardness", help="degeneracies and H")
    common(h)
    h.add_argument("instance")
    h.add_argument("--limit", type=int, default=40)
    h.set_defaults(func=cmd_hardness)

    f = sub.add_parser("fit", help="fit P = 1 - exp(-C H^-beta) to bench output")
    common(f)
    f.add_argument("results", help="results.csv from bench")
    f.add_argument("--solver", default=None)
    f.set_defaults(func=cmd_fit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Graph serialization: canonical JSON and DIMACS edge format."""
from __future__ import annotations

import json
from pathlib import Path

from .graph import Graph, GraphError


class GraphFormatError(GraphError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def graph_to_dict(graph: Graph) -> dict:
    doc = {"n": graph.n, "edges": [list(e) for e in graph.sorted_edges()]}
    if graph.coords is not None:
        doc["coords"] = [list(c) for c in graph.coords]
    if graph.labels is not None:
        doc["labels"] = list(graph.labels)
    doc["meta"] = dict(graph.meta)
    return doc


def graph_from_dict(doc: dict) -> Graph:
    try:
        n = int(doc["n"])
        edges = [tuple(int(x) for x in e) for e in doc.get("edges", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph document: {exc}") from None
    for e in edges:
        if len(e) != 2:
            raise GraphFormatError(f"edge {list(e)} must have two endpoints")
    return Graph(n, frozenset(edges), coords=doc.get("coords"),
                 labels=doc.get("labels"), meta=doc.get("meta") or {})


def dumps_json(graph: Graph) -> str:
    return json.dumps(graph_to_dict(graph), separators=(",", ":")) + "\n"


def loads_json(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(exc.msg, exc.lineno) from None
    return graph_from_dict(doc)


def dumps_dimacs(graph: Graph) -> str:
    lines = [f"p edge {graph.n} {graph.edge_count}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in graph.sorted_edges()]
    return "\n".join(lines) + "\n"


def loads_dimacs(text: str) -> Graph:
    """Parse ``p edge N M`` / ``e u v`` lines (1-indexed); ``c`` lines are comments."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise GraphFormatError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphFormatError(f"bad problem line {raw!r}", lineno)
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise GraphFormatError(f"bad problem line {raw!r}", lineno) from None
        elif tag == "e":
            if n is None:
                raise GraphFormatError("edge before problem line", lineno)
            if len(parts) != 3:
                raise GraphFormatError(f"bad edge line {raw!r}", lineno)
            try:
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
            except ValueError:
                raise GraphFormatError(f"bad edge line {raw!r}", lineno) from None
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise GraphFormatError(f"invalid edge {raw!r}", lineno)
            edges.append((u, v))
        else:
            raise GraphFormatError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise GraphFormatError("missing problem line")
    return Graph(n, frozenset(edges))


def _format_for(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt
    return "dimacs" if path.suffix in (".col", ".dimacs", ".txt") else "json"


def read_graph(path, fmt: str | None = None) -> Graph:
    path = Path(path)
    text = path.read_text()
    fmt = _format_for(path, fmt)
    if fmt == "json":
        return loads_json(text)
    if fmt == "dimacs":
        return loads_dimacs(text)
    raise ValueError(f"unknown graph format {fmt!r}")


def write_graph(graph: Graph, path, fmt: str | None = None) -> None:
    """Write ``graph``; DIMACS drops coordinates, labels and metadata."""
    path = Path(path)
    fmt = _format_for(path, fmt)
    if fmt == "json":
        path.write_text(dumps_json(graph))
    elif fmt == "dimacs":
        path.write_text(dumps_dimacs(graph))
    else:
        raise ValueError(f"unknown graph format {fmt!r}")

"""Reading and writing service graphs.

Two formats are supported:

JSON (canonical)::

    {"version": 1,
     "nodes": [{"id": 0, "hosting": 12}, ...],
     "edges": [{"a": 0, "b": 1, "rate": 17.5}, ...]}

Edge list: first line ``n m``, then ``n`` lines ``id hosting``, then ``m``
lines ``a b rate``.  Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import GraphFormatError, InvalidInputError
from .model import CommEdge, SbaGraph, ServiceNode

FORMAT_VERSION = 1


def graph_to_dict(graph: SbaGraph) -> dict:
    return {
        "version": FORMAT_VERSION,
        "nodes": [{"id": node.id, "hosting": node.hosting} for node in graph.nodes],
        "edges": [{"a": e.a, "b": e.b, "rate": e.rate} for e in graph.edges],
    }


def _field(obj, key, where, kind):
    if not isinstance(obj, dict) or key not in obj:
        raise GraphFormatError(f"{where}: missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise GraphFormatError(f"{where}.{key}: expected a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise GraphFormatError(f"{where}.{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def graph_from_dict(doc: dict) -> SbaGraph:
    if not isinstance(doc, dict):
        raise GraphFormatError("top level must be an object")
    if doc.get("version") != FORMAT_VERSION:
        raise GraphFormatError(f"version: expected {FORMAT_VERSION}, got {doc.get('version')!r}")
    for key in ("nodes", "edges"):
        if not isinstance(doc.get(key), list):
            raise GraphFormatError(f"{key}: expected an array")
    nodes = []
    for i, item in enumerate(doc["nodes"]):
        nodes.append((_field(item, "id", f"nodes[{i}]", int), _field(item, "hosting", f"nodes[{i}]", float)))
    edges = []
    for i, item in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        edges.append((_field(item, "a", where, int), _field(item, "b", where, int), _field(item, "rate", where, float)))
    return _build(nodes, edges)


def _build(nodes, edges) -> SbaGraph:
    try:
        return SbaGraph(
            tuple(ServiceNode(i, h) for i, h in nodes),
            tuple(CommEdge(a, b, r) for a, b, r in edges),
        )
    except InvalidInputError as exc:
        raise GraphFormatError(f"invalid graph: {exc}") from exc


def parse_edge_list(text: str) -> SbaGraph:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].split()
        if stripped:
            lines.append((number, stripped))
    if not lines:
        raise GraphFormatError("line 1: empty file, expected header 'n m'")

    def numbers(entry, count, kinds, what):
        number, tokens = entry
        if len(tokens) != count:
            raise GraphFormatError(f"line {number}: expected {what}, got {' '.join(tokens)!r}")
        try:
            return [kind(tok) for kind, tok in zip(kinds, tokens)]
        except ValueError:
            raise GraphFormatError(f"line {number}: expected {what}, got {' '.join(tokens)!r}") from None

    n, m = numbers(lines[0], 2, (int, int), "header 'n m'")
    if len(lines) != 1 + n + m:
        last = lines[-1][0]
        raise GraphFormatError(f"line {last}: header announces {n} nodes and {m} edges, found {len(lines) - 1} data lines")
    nodes = [numbers(entry, 2, (int, float), "'id hosting'") for entry in lines[1:1 + n]]
    edges = [numbers(entry, 3, (int, int, float), "'a b rate'") for entry in lines[1 + n:]]
    return _build(nodes, edges)


def format_edge_list(graph: SbaGraph) -> str:
    out = [f"{graph.n} {len(graph.edges)}"]
    out += [f"{node.id} {node.hosting!r}" for node in graph.nodes]
    out += [f"{e.a} {e.b} {e.rate!r}" for e in graph.edges]
    return "\n".join(out) + "\n"


def _is_json(path: Path, text: str) -> bool:
    if path.suffix.lower() == ".json":
        return True
    return text.lstrip().startswith("{")


def read_graph(path) -> SbaGraph:
    path = Path(path)
    text = path.read_text()
    if _is_json(path, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        try:
            return graph_from_dict(doc)
        except GraphFormatError as exc:
            raise GraphFormatError(f"{path}: {exc}") from exc
    try:
        return parse_edge_list(text)
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc


def write_graph(graph: SbaGraph, path, fmt: str | None = None):
    """Write ``graph``; the format follows ``fmt`` or else the file suffix (``.json`` or edge list)."""
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "edgelist"
    if fmt == "json":
        path.write_text(json.dumps(graph_to_dict(graph), indent=2) + "\n")
    elif fmt == "edgelist":
        path.write_text(format_edge_list(graph))
    else:
        raise InvalidInputError(f"unknown graph format {fmt!r}")

"""Serialisation of graphs and reports: DOT, CSV (RFC 4180) and JSON."""

from __future__ import annotations

import csv
import io
import json
import re
from collections.abc import Iterable

from .analysis import DominanceGraph, SensitivityRecord
from .graph import DiGraph, StrongDepGraph
from .model import PackageId

__all__ = [
    "dominance_to_dot",
    "graph_from_csv",
    "graph_from_dot",
    "graph_from_json",
    "graph_to_csv",
    "graph_to_dot",
    "graph_to_json",
    "parse_label",
    "read_graph",
    "sensitivity_to_csv",
]


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label(graph: DiGraph, v) -> str:
    return graph.label(v) if isinstance(graph, StrongDepGraph) else str(v)


def parse_label(label: str) -> PackageId:
    """``name=version`` or a bare ``name`` (empty version)."""
    name, _, version = label.partition("=")
    return PackageId(name, version)


def graph_to_dot(graph: DiGraph, name: str = "strongdeps") -> str:
    """DOT with every vertex declared (version, installability) then edges."""
    lines = [f"digraph {name} {{"]
    for v in graph.vertices:
        attrs = []
        if isinstance(v, PackageId) and v.version:
            attrs.append(f"version={_quote(v.version)}")
        if isinstance(graph, StrongDepGraph) and not graph.is_installable(v):
            attrs.append("installable=false")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(_label(graph, v))}{suffix};")
    for u, v in graph.edges():
        lines.append(f"  {_quote(_label(graph, u))} -> {_quote(_label(graph, v))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_ID = r'"(?:[^"\\]|\\.)*"|[A-Za-z0-9_.+\-]+'
_ATTRS = r"(?:\s*\[(?P<attrs>[^\]]*)\])?"
_EDGE_RE = re.compile(rf"^\s*(?P<src>{_ID})\s*->\s*(?P<dst>{_ID}){_ATTRS}\s*;?\s*$")
_NODE_RE = re.compile(rf"^\s*(?P<id>{_ID}){_ATTRS}\s*;?\s*$")
_ATTR_RE = re.compile(rf"(?P<key>\w+)\s*=\s*(?P<value>{_ID})")


def _unquote(tok: str) -> str:
    if tok.startswith('"'):
        return re.sub(r"\\(.)", r"\1", tok[1:-1])
    return tok


def graph_from_dot(text: str) -> StrongDepGraph:
    """Read back a graph written by :func:`graph_to_dot`."""
    vertices: dict[str, PackageId] = {}
    broken = []
    edges = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("digraph", "}", "//", "#")) or line in ("{",):
            continue
        m = _EDGE_RE.match(line)
        if m:
            edges.append((_unquote(m["src"]), _unquote(m["dst"])))
            continue
        m = _NODE_RE.match(line)
        if m is None:
            if "=" in line and "[" not in line:
                continue  # graph-level attribute
            raise ValueError(f"unsupported DOT statement: {line!r}")
        if m["id"] in ("node", "edge", "graph"):
            continue
        label = _unquote(m["id"])
        attrs = {a["key"]: _unquote(a["value"]) for a in _ATTR_RE.finditer(m["attrs"] or "")}
        pid = parse_label(label)
        if "version" in attrs:
            pid = PackageId(pid.name, attrs["version"])
        vertices[label] = pid
        if attrs.get("installable") == "false":
            broken.append(pid)

    def vertex(label):
        if label not in vertices:
            vertices[label] = parse_label(label)
        return vertices[label]

    resolved = [(vertex(a), vertex(b)) for a, b in edges]
    return StrongDepGraph(vertices.values(), resolved, broken)


def graph_to_csv(graph: DiGraph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    for u, v in graph.edges():
        writer.writerow([_label(graph, u), _label(graph, v)])
    return buf.getvalue()


def graph_from_csv(text: str) -> StrongDepGraph:
    """Edges only: isolated vertices and installability are not recorded."""
    edges = []
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"expected 2 columns, got {row!r}")
        edges.append((parse_label(row[0]), parse_label(row[1])))
    vertices = dict.fromkeys(v for e in edges for v in e)
    return StrongDepGraph(vertices, edges)


def sensitivity_to_csv(records: Iterable[SensitivityRecord], label=str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["package", "direct", "strong", "delta"])
    for r in records:
        writer.writerow([label(r.package), r.direct, r.strong, r.delta])
    return buf.getvalue()


def dominance_to_dot(dom: DominanceGraph, label=str, name: str = "dominance") -> str:
    """Bold edges for strict dominance, ``z`` percentage labels otherwise."""
    ids = {rep: f"n{i}" for i, rep in enumerate(dom.classes)}
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    for rep, members in dom.classes.items():
        text = "\\n".join(label(m).replace("\\", "\\\\").replace('"', '\\"') for m in members)
        lines.append(f'  {ids[rep]} [label="{text}"];')
    for a, b, edge in dom.node_edges():
        if edge.strict:
            attrs = "style=bold"
        else:
            attrs = f'label="{float(edge.z):.2f}%"'
        lines.append(f"  {ids[a]} -> {ids[b]} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(graph: DiGraph) -> str:
    """Vertices (name, version, installable) in order, then edges as index pairs."""
    index = {v: i for i, v in enumerate(graph.vertices)}
    strong = isinstance(graph, StrongDepGraph)
    vertices = []
    for v in graph.vertices:
        pid = v if isinstance(v, PackageId) else parse_label(str(v))
        vertices.append(
            {
                "name": pid.name,
                "version": pid.version,
                "installable": graph.is_installable(v) if strong else True,
            }
        )
    edges = [[index[u], index[w]] for u, w in graph.edges()]
    return json.dumps({"vertices": vertices, "edges": edges}, indent=1) + "\n"


def graph_from_json(text: str) -> StrongDepGraph:
    data = json.loads(text)
    try:
        vertices = [PackageId(v["name"], v.get("version", "")) for v in data["vertices"]]
        broken = [p for p, v in zip(vertices, data["vertices"]) if not v.get("installable", True)]
        edges = [(vertices[a], vertices[b]) for a, b in data["edges"]]
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise ValueError(f"malformed graph JSON: {exc}") from None
    return StrongDepGraph(vertices, edges, broken)


def read_graph(text: str, fmt: str | None = None) -> StrongDepGraph:
    """Dispatch on ``fmt`` (dot, csv, json) or sniff the content."""
    if fmt is None:
        head = text.lstrip()[:20]
        fmt = "json" if head.startswith("{") else "dot" if head.startswith(("digraph", "strict")) else "csv"
    readers = {"dot": graph_from_dot, "csv": graph_from_csv, "json": graph_from_json}
    if fmt not in readers:
        raise ValueError(f"unknown graph format {fmt!r}")
    return readers[fmt](text)

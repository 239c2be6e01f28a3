"""File formats: edge lists, graph exports, report tables.

All text output is UTF-8 with ``\\n`` line endings and ``.`` decimals, and
floats are written with ``repr`` so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import networkx as nx
import numpy as np

from .corpus import decode_utf8
from .exceptions import ValidationError
from .graphstats import UNDEFINED
from .sbm.adjacency import AdjacencyMatrix

__all__ = [
    "read_edge_list",
    "load_graph",
    "load_adjacency",
    "write_graphml",
    "write_dot",
    "write_edge_csv",
    "export_graph",
    "EXPORT_SUFFIX",
    "format_value",
    "write_csv",
    "write_json",
]

_HEADERS = {("u", "v"), ("source", "target")}

EXPORT_SUFFIX = {"graphml": ".graphml", "dot": ".dot", "csv": ".csv"}


def read_edge_list(path):
    """Parse a ``u,v[,weight]`` CSV file.

    Returns ``(u, v, weight, lineno)`` tuples; ``weight`` is ``None`` when the
    column is absent. A leading ``u,v`` (or ``source,target``) header and
    lines starting with ``#`` are skipped.
    """
    path = Path(path)
    text = decode_utf8(path.read_bytes(), str(path))
    edges = []
    first = True
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        row = [f.strip() for f in row]
        if first:
            first = False
            if len(row) >= 2 and (row[0].lower(), row[1].lower()) in _HEADERS:
                continue
        if len(row) < 2 or not row[0] or not row[1]:
            raise ValidationError(f"{path}:{lineno}: expected 'u,v[,weight]', got {row!r}")
        weight = None
        if len(row) >= 3 and row[2]:
            try:
                weight = float(row[2])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: weight {row[2]!r} is not a number") from None
        edges.append((row[0], row[1], weight, lineno))
    return edges


def _check_loops(path, edges):
    for u, v, _, lineno in edges:
        if u == v:
            raise ValidationError(f"{path}:{lineno}: self-loop on vertex {u!r}")


def load_graph(path) -> nx.Graph:
    """Simple undirected graph from a CSV edge list or a GraphML file.

    Weights are kept as the ``weight`` attribute but do not affect the binary
    statistics. Duplicate edges collapse; self-loops are rejected.
    """
    path = Path(path)
    if path.suffix.lower() == ".graphml":
        g = nx.Graph(nx.read_graphml(path))
        loops = list(nx.selfloop_edges(g))
        if loops:
            raise ValidationError(f"{path}: self-loop on vertex {loops[0][0]!r}")
        return g
    edges = read_edge_list(path)
    _check_loops(path, edges)
    g = nx.Graph()
    g.add_nodes_from(sorted({x for u, v, _, _ in edges for x in (u, v)}))
    for u, v, w, _ in sorted(edges, key=lambda e: (min(e[0], e[1]), max(e[0], e[1]), e[3])):
        if w is not None:
            g.add_edge(u, v, weight=w)
        else:
            g.add_edge(u, v)
    return g


def load_adjacency(path) -> AdjacencyMatrix:
    """Binary relation matrix from an edge list with string labels.

    Edges are symmetrised, duplicates collapse and vertices are ordered by label.
    """
    edges = read_edge_list(path)
    _check_loops(path, edges)
    return AdjacencyMatrix.from_edges([(u, v) for u, v, _, _ in edges])


def write_graphml(g, path):
    nx.write_graphml(g, path, encoding="utf-8")


def _dot_id(x):
    s = str(x).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def write_dot(g, path, name="G"):
    lines = [f"graph {_dot_id(name)} {{"]
    for v in g.nodes:
        lines.append(f"  {_dot_id(v)};")
    for u, v, d in g.edges(data=True):
        attr = f" [weight={format_value(d['weight'])}]" if "weight" in d else ""
        lines.append(f"  {_dot_id(u)} -- {_dot_id(v)}{attr};")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_edge_csv(g, path):
    rows = [(u, v, d.get("weight", 1)) for u, v, d in g.edges(data=True)]
    write_csv(path, ["u", "v", "weight"], rows)


def export_graph(g, path, fmt):
    """Write ``g`` as ``graphml``, ``dot`` or ``csv``."""
    writers = {"graphml": write_graphml, "dot": write_dot, "csv": write_edge_csv}
    try:
        writer = writers[fmt]
    except KeyError:
        raise ValidationError(f"unknown export format {fmt!r}; choose from {sorted(writers)}") from None
    writer(g, path)


def format_value(x):
    if x is None:
        return UNDEFINED
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return UNDEFINED if x != x else repr(x)
    return str(x)


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(x) for x in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def write_json(path, obj):
    text = json.dumps(obj, indent=2, ensure_ascii=False, default=_jsonable, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")

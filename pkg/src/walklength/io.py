"""Text formats shared by the library and the CLI.

All numbers are written with 12 significant digits and ``inf`` for infinity:

* matrix CSV: square grid, no header;
* edge list CSV: header ``source,target,weight``, vertex names mapped to
  indices by first appearance;
* filtration dump: header ``dim,vertices,value`` with ``;``-joined vertices;
* diagram CSV: header ``dim,birth,death``;
* linkage CSV: header ``step,cluster_a,cluster_b,distance``.
"""
from __future__ import annotations

import csv
import io
from typing import Iterable, List, Sequence

import numpy as np

from .digraph import WeightedDigraph
from .filtrations import FilteredComplex
from .persistence import PersistenceDiagram

EDGE_HEADER = ["source", "target", "weight"]
FILTRATION_HEADER = ["dim", "vertices", "value"]
DIAGRAM_HEADER = ["dim", "birth", "death"]
LINKAGE_HEADER = ["step", "cluster_a", "cluster_b", "distance"]


def fmt(x: float) -> str:
    x = float(x)
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    out = f"{x:.12g}"
    return "0" if out == "-0" else out


def _parse_float(token: str) -> float:
    return float(token.strip())


def _rows(text: str) -> List[List[str]]:
    return [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]


def _header(text: str) -> List[str]:
    rows = _rows(text)
    return [c.strip().lower() for c in rows[0]] if rows else []


def _write(rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


# -- matrices and graphs ------------------------------------------------------


def format_matrix(matrix) -> str:
    return _write([fmt(x) for x in row] for row in np.asarray(matrix, dtype=np.float64))


def parse_matrix(text: str) -> np.ndarray:
    rows = [[_parse_float(c) for c in row] for row in _rows(text)]
    if not rows:
        return np.zeros((0, 0))
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix CSV must be square")
    return np.array(rows, dtype=np.float64)


def parse_edge_list(text: str) -> WeightedDigraph:
    rows = _rows(text)
    if [c.strip().lower() for c in rows[0]] != EDGE_HEADER:
        raise ValueError("edge list must start with header source,target,weight")
    names: dict = {}
    edges = []
    for row in rows[1:]:
        if len(row) != 3:
            raise ValueError(f"bad edge row {row}")
        u, v = (names.setdefault(x.strip(), len(names)) for x in row[:2])
        edges.append((u, v, _parse_float(row[2])))
    w = np.full((len(names), len(names)), np.inf)
    np.fill_diagonal(w, 0.0)
    for u, v, wt in edges:
        w[u, v] = wt
    return WeightedDigraph(w, list(names))


def detect_format(text: str) -> str:
    """``"edges"``, ``"filtration"``, ``"diagram"`` or ``"matrix"`` from the header."""
    head = _header(text)
    if head == EDGE_HEADER:
        return "edges"
    if head == FILTRATION_HEADER:
        return "filtration"
    if head == DIAGRAM_HEADER:
        return "diagram"
    return "matrix"


def parse_graph(text: str) -> WeightedDigraph:
    if detect_format(text) == "edges":
        return parse_edge_list(text)
    return WeightedDigraph(parse_matrix(text))


# -- filtrations ----------------------------------------------------------------


def format_filtration(fc: FilteredComplex) -> str:
    rows = [FILTRATION_HEADER]
    for simplex, value in fc.cells():
        rows.append([str(len(simplex) - 1), ";".join(str(v) for v in simplex), fmt(value)])
    return _write(rows)


def parse_filtration(text: str) -> FilteredComplex:
    rows = _rows(text)
    if [c.strip().lower() for c in rows[0]] != FILTRATION_HEADER:
        raise ValueError("filtration dump must start with header dim,vertices,value")
    by_dim: dict = {}
    for row in rows[1:]:
        d = int(row[0])
        verts = sorted(int(v) for v in row[1].split(";"))
        if len(verts) != d + 1:
            raise ValueError(f"row {row}: {len(verts)} vertices for dimension {d}")
        by_dim.setdefault(d, ([], []))
        by_dim[d][0].append(verts)
        by_dim[d][1].append(_parse_float(row[2]))
    top = max(by_dim) if by_dim else 0
    simplices, values = [], []
    for d in range(top + 1):
        s, v = by_dim.get(d, ([], []))
        simplices.append(np.array(s, dtype=np.int64).reshape(-1, d + 1))
        values.append(np.array(v, dtype=np.float64))
    return FilteredComplex(simplices, values)


# -- diagrams -------------------------------------------------------------------


def format_diagram(diagram: PersistenceDiagram) -> str:
    rows = [DIAGRAM_HEADER]
    rows += [[str(d), fmt(b), fmt(de)] for d, b, de in diagram]
    return _write(rows)


def parse_diagram(text: str) -> PersistenceDiagram:
    rows = _rows(text)
    if not rows or [c.strip().lower() for c in rows[0]] != DIAGRAM_HEADER:
        raise ValueError("diagram CSV must start with header dim,birth,death")
    return PersistenceDiagram((int(r[0]), _parse_float(r[1]), _parse_float(r[2])) for r in rows[1:])


# -- clustering -------------------------------------------------------------------


def format_linkage(merges) -> str:
    rows = [LINKAGE_HEADER]
    rows += [[str(s), str(a), str(b), fmt(d)] for s, a, b, d in merges]
    return _write(rows)


def parse_linkage(text: str):
    rows = _rows(text)
    return [(int(r[0]), int(r[1]), int(r[2]), _parse_float(r[3])) for r in rows[1:]]

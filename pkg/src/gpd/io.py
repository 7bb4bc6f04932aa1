"""CSV loaders and writers for graphs and signals.

Edge lists use a ``src,dst,weight`` header (0-based integer node ids; the
weight column is optional and defaults to 1.0). Signal files use a
``node,value`` header, or ``node,sig_0,...,sig_m`` for several signals per
file. Loaders symmetrize, validate, and report the offending line number on
malformed input.
"""

import csv

import numpy as np

from .errors import DataFormatError
from .graphs import Graph


def _rows(path):
    with open(path, newline="") as fh:
        yield from csv.reader(fh)


def load_edge_list(path, n_nodes=None):
    """Read a graph from an edge-list CSV.

    The node count is ``max id + 1`` unless ``n_nodes`` is given. Each edge
    sets both (i, j) and (j, i); self loops and negative weights are
    rejected. A repeated edge overwrites the earlier weight.
    """
    edges = []
    max_node = -1
    for lineno, row in enumerate(_rows(path), start=1):
        if lineno == 1:
            if [c.strip() for c in row] not in (["src", "dst", "weight"], ["src", "dst"]):
                raise DataFormatError(
                    f"{path}: line 1: expected header 'src,dst[,weight]', got {','.join(row)!r}"
                )
            continue
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) not in (2, 3):
            raise DataFormatError(f"{path}: line {lineno}: expected 2 or 3 fields")
        try:
            src, dst = int(row[0]), int(row[1])
            weight = float(row[2]) if len(row) == 3 else 1.0
        except ValueError as exc:
            raise DataFormatError(f"{path}: line {lineno}: {exc}") from exc
        if src < 0 or dst < 0:
            raise DataFormatError(f"{path}: line {lineno}: node ids must be >= 0")
        if src == dst:
            raise DataFormatError(f"{path}: line {lineno}: self loops are not allowed")
        if weight < 0.0:
            raise DataFormatError(f"{path}: line {lineno}: negative weight")
        edges.append((src, dst, weight))
        max_node = max(max_node, src, dst)
    if not edges:
        raise DataFormatError(f"{path}: no edges found")
    n = max_node + 1 if n_nodes is None else n_nodes
    if max_node >= n:
        raise DataFormatError(f"{path}: node id {max_node} exceeds n_nodes={n}")
    adjacency = np.zeros((n, n))
    for src, dst, weight in edges:
        adjacency[src, dst] = weight
        adjacency[dst, src] = weight
    return Graph(n, adjacency)


def load_signals(path, n_nodes=None):
    """Read one or more node signals from a CSV.

    Returns (column_names, values) where ``values`` has one column per
    signal. Every node 0..N-1 must appear exactly once.
    """
    names = None
    entries = {}
    for lineno, row in enumerate(_rows(path), start=1):
        if lineno == 1:
            cells = [c.strip() for c in row]
            if len(cells) < 2 or cells[0] != "node":
                raise DataFormatError(
                    f"{path}: line 1: expected header 'node,<name>[,...]', got {','.join(row)!r}"
                )
            names = cells[1:]
            continue
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(names) + 1:
            raise DataFormatError(
                f"{path}: line {lineno}: expected {len(names) + 1} fields, got {len(row)}"
            )
        try:
            node = int(row[0])
            values = [float(c) for c in row[1:]]
        except ValueError as exc:
            raise DataFormatError(f"{path}: line {lineno}: {exc}") from exc
        if node < 0:
            raise DataFormatError(f"{path}: line {lineno}: node ids must be >= 0")
        if node in entries:
            raise DataFormatError(f"{path}: line {lineno}: duplicate node {node}")
        entries[node] = values
    if names is None or not entries:
        raise DataFormatError(f"{path}: no signal rows found")
    n = max(entries) + 1 if n_nodes is None else n_nodes
    missing = sorted(set(range(n)) - set(entries))
    if missing:
        raise DataFormatError(f"{path}: missing rows for nodes {missing[:5]}")
    extra = sorted(set(entries) - set(range(n)))
    if extra:
        raise DataFormatError(f"{path}: node id {extra[0]} exceeds n_nodes={n}")
    matrix = np.array([entries[i] for i in range(n)], dtype=float)
    return names, matrix


def format_value(value):
    """Canonical CSV cell text: shortest round-trip repr for floats."""
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans have no CSV representation here")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    text = str(value)
    if any(c in text for c in ",\n\r"):
        raise ValueError(f"cell text {text!r} would break the CSV layout")
    return text


def write_csv(path, header, rows):
    """Write rows under a declared header, validating shape cell by cell.

    Output is byte-stable: '\\n' line endings and shortest round-trip float
    formatting.
    """
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row {row!r} does not match header {header}")
        lines.append(",".join(format_value(v) for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path

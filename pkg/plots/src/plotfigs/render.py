"""Figure rendering from experiment CSVs.

Three figure kinds are recognized by their exact header:

  fit-curves  trial,target_kind,epoch,nmse     NMSE vs epoch per target kind
  eigsim      graph_family,N,K,trial,similarity  similarity vs size (log y)
  compare     trial,method,epoch,nmse          NMSE vs epoch per method, with
                                               epoch-independent methods
                                               (epoch -1) as horizontal lines
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SCHEMAS = {
    "fit-curves": ("trial", "target_kind", "epoch", "nmse"),
    "eigsim": ("graph_family", "N", "K", "trial", "similarity"),
    "compare": ("trial", "method", "epoch", "nmse"),
}

AGGREGATES = {"mean": np.mean, "median": np.median}

BASELINE_EPOCH = -1

# fixed style so identical data renders to identical bytes
plt.rcParams["svg.hashsalt"] = "plotfigs"
plt.rcParams["figure.figsize"] = (6.0, 4.0)
plt.rcParams["figure.dpi"] = 110

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


class SchemaMismatchError(Exception):
    """Header does not match the declared schema of the figure kind."""

    def __init__(self, kind, missing, extra):
        self.kind = kind
        self.missing = list(missing)
        self.extra = list(extra)
        super().__init__(
            f"{kind}: header mismatch (missing columns {self.missing}, extra {self.extra})"
        )


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job: input CSV, figure kind, output image, aggregate."""

    input_csv: str
    kind: str
    output_path: str
    aggregate: str = "median"

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if self.aggregate not in AGGREGATES:
            raise ValueError(f"unknown aggregate {self.aggregate!r}")


def read_table(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows = [row for row in reader if row]
    return tuple(c.strip() for c in header), rows


def detect_kind(path):
    """Figure kind whose schema exactly matches the file header, or None."""
    header, _ = read_table(path)
    for kind, schema in SCHEMAS.items():
        if header == schema:
            return kind
    return None


def _check_schema(kind, header):
    expected = SCHEMAS[kind]
    if header != expected:
        missing = [c for c in expected if c not in header]
        extra = [c for c in header if c not in expected]
        raise SchemaMismatchError(kind, missing, extra)


def _aggregate_by(rows, key_cols, value_col, aggregate):
    """Sorted {series key: (x values, aggregated y values)} mapping."""
    groups = {}
    for row in rows:
        key = tuple(row[c] for c in key_cols)
        groups.setdefault(key, []).append(float(row[value_col]))
    return {key: AGGREGATES[aggregate](vals) for key, vals in sorted(groups.items())}


def _as_dicts(header, rows):
    out = []
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row {row!r} does not match header {header}")
        out.append(dict(zip(header, row)))
    return out


def render(spec):
    """Render one figure; returns the output path.

    Raises ``SchemaMismatchError`` when the CSV header does not match the
    kind, and ``ValueError`` on empty input.
    """
    header, raw = read_table(spec.input_csv)
    _check_schema(spec.kind, header)
    if not raw:
        raise ValueError(f"{spec.input_csv}: no data rows")
    rows = _as_dicts(header, raw)

    fig, ax = plt.subplots()
    try:
        if spec.kind == "fit-curves":
            _render_fit_curves(ax, rows, spec.aggregate)
        elif spec.kind == "eigsim":
            _render_eigsim(ax, rows, spec.aggregate)
        else:
            _render_compare(ax, rows, spec.aggregate)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        output = Path(spec.output_path)
        output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(output, metadata=_clean_metadata(output.suffix))
    finally:
        plt.close(fig)
    return Path(spec.output_path)


def _clean_metadata(suffix):
    # SVG embeds a creation date unless suppressed; PNG carries none
    if suffix == ".svg":
        return {"Date": None}
    return None


def _series_labels(rows, column):
    return sorted({row[column] for row in rows})


def _render_fit_curves(ax, rows, aggregate):
    values = _aggregate_by(rows, ("target_kind", "epoch"), "nmse", aggregate)
    for idx, kind in enumerate(_series_labels(rows, "target_kind")):
        points = sorted(
            (int(key[1]), val) for key, val in values.items() if key[0] == kind
        )
        epochs = [p[0] for p in points]
        nmse = [p[1] for p in points]
        ax.plot(epochs, nmse, color=COLORS[idx % len(COLORS)], label=kind)
    ax.set_xlabel("epoch")
    ax.set_ylabel(f"{aggregate} NMSE")
    ax.set_title("fitting error by target")


def _render_eigsim(ax, rows, aggregate):
    values = _aggregate_by(rows, ("graph_family", "N"), "similarity", aggregate)
    for idx, family in enumerate(_series_labels(rows, "graph_family")):
        points = sorted(
            (int(key[1]), val) for key, val in values.items() if key[0] == family
        )
        sizes = [p[0] for p in points]
        similarity = [p[1] for p in points]
        ax.plot(sizes, similarity, marker="o", color=COLORS[idx % len(COLORS)], label=family)
    ax.set_yscale("log")
    ax.set_xlabel("graph size")
    ax.set_ylabel(f"{aggregate} eigenvector similarity")
    ax.set_title("leading eigenspace alignment")


def _render_compare(ax, rows, aggregate):
    values = _aggregate_by(rows, ("method", "epoch"), "nmse", aggregate)
    methods = _series_labels(rows, "method")
    for idx, method in enumerate(methods):
        points = sorted(
            (int(key[1]), val) for key, val in values.items() if key[0] == method
        )
        color = COLORS[idx % len(COLORS)]
        if len(points) == 1 and points[0][0] == BASELINE_EPOCH:
            ax.axhline(points[0][1], color=color, linestyle="--", label=method)
        else:
            epochs = [p[0] for p in points if p[0] != BASELINE_EPOCH]
            nmse = [p[1] for p in points if p[0] != BASELINE_EPOCH]
            ax.plot(epochs, nmse, color=color, label=method)
    ax.set_xlabel("epoch")
    ax.set_ylabel(f"{aggregate} NMSE")
    ax.set_title("denoising comparison")

"""Command-line renderer.

    plot_figs --in results/ --out figs/ [--aggregate median] [--formats png,svg]

Scans the input directory for CSVs whose header matches a known figure kind
and writes one image per recognized file and format. Unrecognized CSVs are
skipped with a notice.
"""

import argparse
import sys
from pathlib import Path

from .render import FigureSpec, SchemaMismatchError, detect_kind, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plot_figs", description="Render experiment CSVs to figures."
    )
    parser.add_argument("--in", dest="input_dir", required=True, help="directory of CSV files")
    parser.add_argument("--out", dest="output_dir", required=True, help="directory for images")
    parser.add_argument("--aggregate", choices=("mean", "median"), default="median")
    parser.add_argument("--formats", default="png,svg", help="comma-separated: png, svg")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    input_dir = Path(args.input_dir)
    if not input_dir.is_dir():
        print(f"plot_figs: {input_dir} is not a directory", file=sys.stderr)
        return 2
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    if any(f not in ("png", "svg") for f in formats):
        print(f"plot_figs: unsupported format in {args.formats!r}", file=sys.stderr)
        return 2

    rendered = 0
    for csv_path in sorted(input_dir.glob("*.csv")):
        kind = detect_kind(csv_path)
        if kind is None:
            print(f"plot_figs: skipping {csv_path.name} (unrecognized header)", file=sys.stderr)
            continue
        for fmt in formats:
            output = Path(args.output_dir) / f"{csv_path.stem}.{fmt}"
            spec = FigureSpec(
                input_csv=str(csv_path), kind=kind,
                output_path=str(output), aggregate=args.aggregate,
            )
            try:
                print(render(spec))
            except (SchemaMismatchError, ValueError) as exc:
                print(f"plot_figs: {exc}", file=sys.stderr)
                return 3
            rendered += 1
    if rendered == 0:
        print("plot_figs: no recognized CSV files found", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

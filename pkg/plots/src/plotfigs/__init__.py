"""Renderer for the denoising experiment CSVs.

Consumes the harness output files (fit-curves, eigsim, compare) purely
through their CSV schemas and emits PNG/SVG panels. Rendering is
deterministic: rows are sorted internally, styles are fixed, and no
timestamps are embedded, so byte-identical inputs (in any row order)
produce byte-identical images.
"""

from .render import FigureSpec, SchemaMismatchError, detect_kind, render

__all__ = ["FigureSpec", "SchemaMismatchError", "detect_kind", "render"]

__version__ = "0.1.0"

"""Acceptance for the renderer: every golden CSV renders with the right
series counts, and images are pixel-identical under input row shuffling."""

import subprocess
import sys

from plotfigs import FigureSpec, detect_kind, render
from test_render import line_labels, shuffle_rows

EXPECTED_SERIES = {
    "fit_curves.csv": 3,
    "eigsim.csv": 5,
    "compare.csv": 4,
}


def test_renderer_acceptance(golden_dir, tmp_path):
    for name, expected_count in EXPECTED_SERIES.items():
        src = golden_dir / name
        kind = detect_kind(src)
        assert kind is not None, f"{name}: unrecognized golden header"
        for fmt in ("png", "svg"):
            out = tmp_path / f"{src.stem}.{fmt}"
            spec = FigureSpec(input_csv=str(src), kind=kind, output_path=str(out))
            render(spec)
            assert out.exists() and out.stat().st_size > 0
            assert len(line_labels(spec)) == expected_count
            shuffled = shuffle_rows(src, tmp_path / f"shuffled_{name}", seed=7)
            out_shuffled = tmp_path / f"{src.stem}_shuffled.{fmt}"
            render(FigureSpec(input_csv=str(shuffled), kind=kind, output_path=str(out_shuffled)))
            assert out.read_bytes() == out_shuffled.read_bytes(), f"{name}/{fmt} not deterministic"
    print("\nACCEPTANCE 11: PASS  (3 golden CSVs, png+svg, shuffle-stable)")


def test_cli_renders_directory(golden_dir, tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "plotfigs.cli",
         "--in", str(golden_dir), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    produced = sorted(p.name for p in tmp_path.iterdir())
    assert produced == [
        "compare.png", "compare.svg",
        "eigsim.png", "eigsim.svg",
        "fit_curves.png", "fit_curves.svg",
    ]

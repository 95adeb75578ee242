"""End-to-end check: render the five-curve comparison preset.

The curve files are produced by the experiment harness's command line
tool, so this suite exercises exactly the CSV interface the renderer is
built against.
"""

import shutil
import subprocess
import sys

import pytest

from tdcplot.figspec import FigureSpec
from tdcplot.render import build_figure, render


def announce(capsys, index, label, ok):
    with capsys.disabled():
        print(f"acceptance {index:02d} {label}: {'PASS' if ok else 'FAIL'}")


def produce_fig2_curves(out_dir):
    """Run the harness CLI for the five-curve stepsize-comparison preset.

    The tiny scale keeps the acceptance run fast; the figure layout, the
    labels, and output determinism do not depend on curve values.
    """
    exe = shutil.which("tdclab")
    base = [exe] if exe else [sys.executable, "-m", "tdclab.cli"]
    result = subprocess.run(
        base + ["preset", "--name", "fig2", "--scale", "0.02",
                "--out-dir", str(out_dir)],
        capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    return sorted(out_dir.glob("fig2-*.csv"))


def test_11_fig2_preset_two_panel_figure(tmp_path, capsys):
    csvs = produce_fig2_curves(tmp_path / "curves")
    assert len(csvs) == 5

    out1 = tmp_path / "fig2.svg"
    spec = FigureSpec(inputs=tuple(str(p) for p in csvs), out=str(out1),
                      format="svg")
    fig = build_figure(spec)

    two_panels_per_error_type = len(fig.axes) == 4
    five_per_panel = all(len(ax.lines) == 5 for ax in fig.axes)
    labels = [text.get_text() for text in fig.legends[0].get_texts()]
    expected_labels = [
        "diminishing c=1.8 sigma=0.45 nu=0.3",
        "constant alpha=0.01 beta=0.006",
        "constant alpha=0.02 beta=0.008",
        "constant alpha=0.05 beta=0.02",
        "constant alpha=0.1 beta=0.02",
    ]
    labels_ok = sorted(labels) == sorted(expected_labels)

    render(spec)
    first = out1.read_bytes()
    out2 = tmp_path / "fig2-again.svg"
    render(FigureSpec(inputs=tuple(str(p) for p in csvs), out=str(out2),
                      format="svg"))
    byte_identical = first == out2.read_bytes()

    ok = (two_panels_per_error_type and five_per_panel and labels_ok
          and byte_identical)
    announce(capsys, 11, "fig2 preset two-panel figure", ok)
    assert two_panels_per_error_type
    assert five_per_panel
    assert labels_ok, labels
    assert byte_identical
    for label in expected_labels:
        assert label in first.decode()

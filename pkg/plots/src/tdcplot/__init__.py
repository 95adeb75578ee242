"""Publication-style convergence-curve figures from experiment CSV files.

The package reads the experiment harness's self-describing curve CSVs
and renders a multi-panel figure per error type, with an optional
decay-envelope overlay, through a declarative figure spec.
"""

from .curves import HEADER, Curve, read_curve
from .errors import InvalidSpec, MalformedCsv, TdcPlotError
from .figspec import EnvelopeSpec, FigureSpec, load_envelope
from .render import build_figure, envelope_values, render, tail_start

__all__ = [
    "HEADER",
    "Curve",
    "read_curve",
    "InvalidSpec",
    "MalformedCsv",
    "TdcPlotError",
    "EnvelopeSpec",
    "FigureSpec",
    "load_envelope",
    "build_figure",
    "envelope_values",
    "render",
    "tail_start",
]

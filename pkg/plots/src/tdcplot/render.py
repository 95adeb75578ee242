"""Figure construction and deterministic file output.

One figure holds a row per error type (training, then tracking) and a
column per requested panel (full horizon, then the tail window). Every
input curve is drawn in each panel with its preamble label; curves
aggregated over more than one run get a standard-error band. Output is
deterministic: rendering the same spec twice produces identical bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .curves import Curve, read_curve
from .errors import InvalidSpec
from .figspec import EnvelopeSpec, FigureSpec

_ROWS = (
    ("mean squared training error", "mean_theta_sq_err", "se_theta_sq_err"),
    ("mean squared tracking error", "mean_z_sq_err", "se_z_sq_err"),
)
_HASH_SALT = "tdcplot"
_ENVELOPE_LABEL = "decay envelope"


def envelope_values(env: EnvelopeSpec, t) -> np.ndarray:
    """Decay envelope on a checkpoint grid.

    When the slow exponent clears 1.5x the fast one the fast scale
    dominates and the order is t**-nu; closer exponents give
    t**-(2(sigma-nu)-epsilon).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 1.0):
        raise InvalidSpec("the envelope is defined for t >= 1")
    if env.sigma > 1.5 * env.nu:
        exponent = env.nu
    else:
        exponent = 2.0 * (env.sigma - env.nu) - env.epsilon
    return env.scale * t ** -exponent


def tail_start(n: int, fraction: float) -> int:
    """First index of the tail window: the last ceil(n*fraction)
    checkpoints, never fewer than two."""
    keep = max(2, math.ceil(n * fraction))
    return max(0, n - keep)


def _window(curve: Curve, panel: str, fraction: float) -> slice:
    if panel == "tail":
        return slice(tail_start(len(curve.t), fraction), None)
    return slice(None)


def _panel_title(panel: str, fraction: float) -> str:
    if panel == "tail":
        return f"last {fraction:.0%} of checkpoints"
    return "full horizon"


def build_figure(spec: FigureSpec) -> Figure:
    """Read the spec's curves and assemble the figure object."""
    curves = [read_curve(p) for p in spec.inputs]
    ncols = len(spec.panels)
    fig = Figure(figsize=(5.5 * ncols, 7.5), dpi=100)
    axes = fig.subplots(2, ncols, squeeze=False)

    for i, (ylabel, mean_name, se_name) in enumerate(_ROWS):
        for j, panel in enumerate(spec.panels):
            ax = axes[i][j]
            for curve in curves:
                window = _window(curve, panel, spec.tail_fraction)
                t = curve.t[window].astype(float)
                mean = getattr(curve, mean_name)[window]
                se = getattr(curve, se_name)[window]
                if spec.logx:
                    keep = t >= 1.0
                    t, mean, se = t[keep], mean[keep], se[keep]
                line, = ax.plot(t, mean, linewidth=1.2, label=curve.label)
                if curve.runs > 1:
                    ax.fill_between(t, mean - se, mean + se, alpha=0.25,
                                    color=line.get_color(), linewidth=0)
            if spec.envelope is not None and curves:
                window = _window(curves[0], panel, spec.tail_fraction)
                t_env = curves[0].t[window].astype(float)
                t_env = t_env[t_env >= 1.0]
                ax.plot(t_env, envelope_values(spec.envelope, t_env),
                        linestyle="--", linewidth=1.0, color="black",
                        label=_ENVELOPE_LABEL)
            if spec.logx:
                ax.set_xscale("log")
            if spec.logy:
                ax.set_yscale("log")
            ax.grid(True, which="both", alpha=0.3)
            if i == 0:
                ax.set_title(_panel_title(panel, spec.tail_fraction))
            if i == len(_ROWS) - 1:
                ax.set_xlabel("t")
            if j == 0:
                ax.set_ylabel(ylabel)

    handles, labels = axes[0][0].get_legend_handles_labels()
    fig.legend(handles, labels, loc="lower center",
               ncols=min(3, len(labels)), frameon=False)
    fig.tight_layout(rect=(0.0, 0.08, 1.0, 1.0))
    return fig


def render(spec: FigureSpec) -> Path:
    """Draw the figure and write it to the spec's output path."""
    fig = build_figure(spec)
    out = Path(spec.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": _HASH_SALT,
                                "svg.fonttype": "none"}):
        if spec.format == "svg":
            fig.savefig(out, format="svg", metadata={"Date": None})
        else:
            fig.savefig(out, format="png")
    return out

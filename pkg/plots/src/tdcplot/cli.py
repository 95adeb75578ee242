"""Command line entry point: tdcplot.

Two invocation forms: a figure-spec JSON document, or positional curve
CSVs with an output path and optional layout flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InvalidSpec, TdcPlotError
from .figspec import FigureSpec, load_envelope
from .render import render

__all__ = ["main"]


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdcplot",
        description="Render multi-panel convergence-curve figures from "
                    "experiment CSV files.")
    parser.add_argument("csvs", nargs="*", help="curve CSV files")
    parser.add_argument("--spec", default=None,
                        help="figure-spec JSON file (replaces every other "
                             "argument)")
    parser.add_argument("--out", default=None,
                        help="output image path (.svg or .png)")
    parser.add_argument("--envelope", default=None,
                        help="envelope-parameter JSON to overlay as a "
                             "dashed reference")
    parser.add_argument("--tail-fraction", type=float, default=0.2,
                        help="fraction of checkpoints in the tail panel")
    parser.add_argument("--panels", default="full,tail",
                        help="comma-separated panel list")
    parser.add_argument("--linear-x", action="store_true",
                        help="linear instead of log time axis")
    parser.add_argument("--linear-y", action="store_true",
                        help="linear instead of log error axis")
    return parser


def _spec_from_args(args) -> FigureSpec:
    if args.spec is not None:
        if args.csvs or args.out is not None:
            raise InvalidSpec(
                "--spec replaces positional CSVs and --out; give one form")
        return FigureSpec.from_json_file(args.spec)
    if not args.csvs:
        raise InvalidSpec("give curve CSVs (or --spec)")
    if args.out is None:
        raise InvalidSpec("--out is required with positional CSVs")
    suffix = Path(args.out).suffix.lstrip(".").lower()
    envelope = None
    if args.envelope is not None:
        envelope = load_envelope(args.envelope)
    return FigureSpec(
        inputs=tuple(args.csvs),
        out=args.out,
        format=suffix,
        panels=tuple(p for p in args.panels.split(",") if p),
        tail_fraction=args.tail_fraction,
        logx=not args.linear_x,
        logy=not args.linear_y,
        envelope=envelope,
    )


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        out = render(spec)
    except TdcPlotError as exc:
        print(f"tdcplot: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"out": str(out), "curves": len(spec.inputs),
                      "panels": list(spec.panels)}, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())

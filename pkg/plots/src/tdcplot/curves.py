"""Reading of the experiment harness's curve CSV format.

A curve file is self-describing: a `# config:` comment holding the
producing experiment's config as JSON, an optional `# blocks:` comment
with block boundaries, a fixed five-column header, and one row per
checkpoint. This module parses that format from the file alone, without
importing the producer.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .errors import MalformedCsv

HEADER = "t,mean_theta_sq_err,se_theta_sq_err,mean_z_sq_err,se_z_sq_err"

_CONFIG_PREFIX = "# config:"
_BLOCKS_PREFIX = "# blocks:"


@dataclasses.dataclass(frozen=True)
class Curve:
    """One aggregated error curve with the config it was produced from."""

    path: str
    label: str
    runs: int
    config: dict
    t: np.ndarray
    mean_theta_sq_err: np.ndarray
    se_theta_sq_err: np.ndarray
    mean_z_sq_err: np.ndarray
    se_z_sq_err: np.ndarray
    blocks: np.ndarray | None


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


def read_curve(path) -> Curve:
    """Parse one harness CSV; malformed content names its file and line."""
    path = Path(path)
    config = None
    blocks = None
    header_line = None
    rows = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(_CONFIG_PREFIX):
            payload = line[len(_CONFIG_PREFIX):].strip()
            try:
                config = json.loads(payload)
            except json.JSONDecodeError as exc:
                raise MalformedCsv(
                    f"{path}:{lineno}: config comment is not valid JSON "
                    f"({exc})") from None
            continue
        if line.startswith(_BLOCKS_PREFIX):
            payload = line[len(_BLOCKS_PREFIX):].strip()
            try:
                blocks = [int(x) for x in payload.split(",")]
            except ValueError:
                raise MalformedCsv(
                    f"{path}:{lineno}: block boundaries must be integers, "
                    f"got {payload!r}") from None
            continue
        if line.startswith("#"):
            continue
        if header_line is None:
            if line != HEADER:
                raise MalformedCsv(
                    f"{path}:{lineno}: expected the header {HEADER!r}, "
                    f"got {line!r}")
            header_line = lineno
            continue
        fields = line.split(",")
        if len(fields) != 5:
            raise MalformedCsv(
                f"{path}:{lineno}: expected 5 fields, got {len(fields)}")
        try:
            t = int(fields[0])
            values = [float(x) for x in fields[1:]]
        except ValueError as exc:
            raise MalformedCsv(f"{path}:{lineno}: {exc}") from None
        if rows and t <= rows[-1][0]:
            raise MalformedCsv(
                f"{path}:{lineno}: checkpoint times must increase, "
                f"got t={t} after t={rows[-1][0]}")
        rows.append((t, *values))

    if config is None:
        raise MalformedCsv(f"{path}:1: missing the '# config:' preamble")
    if not rows:
        raise MalformedCsv(f"{path}: no checkpoint rows")
    runs = config.get("runs")
    if not isinstance(runs, int) or runs < 1:
        raise MalformedCsv(
            f"{path}: config field 'runs' must be a positive integer, "
            f"got {runs!r}")
    label = config.get("label") or path.stem

    columns = list(zip(*rows))
    return Curve(
        path=str(path),
        label=str(label),
        runs=runs,
        config=config,
        t=_frozen(columns[0], np.int64),
        mean_theta_sq_err=_frozen(columns[1], float),
        se_theta_sq_err=_frozen(columns[2], float),
        mean_z_sq_err=_frozen(columns[3], float),
        se_z_sq_err=_frozen(columns[4], float),
        blocks=None if blocks is None else _frozen(blocks, np.int64),
    )

"""Figure specification: inputs, layout, scales, and the output target.

A spec can be built directly or loaded from a JSON file. In the JSON
form, relative paths (inputs, output, envelope file) resolve against the
spec file's directory, so a spec can live next to its data.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from .errors import InvalidSpec

_FORMATS = ("svg", "png")
_PANELS = ("full", "tail")
_SPEC_KEYS = frozenset({"inputs", "out", "format", "panels", "tail_fraction",
                        "logx", "logy", "envelope"})
_ENVELOPE_KEYS = frozenset({"sigma", "nu", "epsilon", "scale"})


@dataclasses.dataclass(frozen=True)
class EnvelopeSpec:
    """Decay-envelope parameters for the dashed reference overlay.

    sigma and nu are the slow and fast stepsize decay exponents, epsilon
    is the slack taken off the close-exponent rate, and scale multiplies
    the whole curve.
    """

    sigma: float
    nu: float
    epsilon: float
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.nu < self.sigma <= 1.0:
            raise InvalidSpec(
                f"envelope needs 0 < nu < sigma <= 1, got sigma={self.sigma} "
                f"nu={self.nu}")
        if not 0.0 < self.epsilon <= self.sigma - self.nu:
            raise InvalidSpec(
                f"envelope epsilon must lie in (0, sigma - nu], got "
                f"{self.epsilon}")
        if not self.scale > 0.0:
            raise InvalidSpec(f"envelope scale must be positive, got "
                              f"{self.scale}")


@dataclasses.dataclass(frozen=True)
class FigureSpec:
    """What to draw: curve files, panels, axis scales, and the output."""

    inputs: tuple[str, ...]
    out: str
    format: str
    panels: tuple[str, ...] = _PANELS
    tail_fraction: float = 0.2
    logx: bool = True
    logy: bool = True
    envelope: EnvelopeSpec | None = None

    def __post_init__(self):
        if not self.inputs:
            raise InvalidSpec("a figure needs at least one input curve")
        if self.format not in _FORMATS:
            raise InvalidSpec(
                f"format must be one of {_FORMATS}, got {self.format!r}")
        if (not self.panels or len(set(self.panels)) != len(self.panels)
                or any(p not in _PANELS for p in self.panels)):
            raise InvalidSpec(
                f"panels must be a distinct nonempty subset of {_PANELS}, "
                f"got {self.panels!r}")
        if not 0.0 < self.tail_fraction < 1.0:
            raise InvalidSpec(
                f"tail_fraction must lie in (0, 1), got {self.tail_fraction}")

    @classmethod
    def from_json_file(cls, path) -> "FigureSpec":
        """Load a spec document; see the repository README for the schema."""
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise InvalidSpec(f"{path}: the spec must be a JSON object")
        unknown = sorted(set(doc) - _SPEC_KEYS)
        if unknown:
            raise InvalidSpec(f"{path}: unknown spec keys {unknown}")
        if "inputs" not in doc:
            raise InvalidSpec(f"{path}: missing 'inputs'")
        if "out" not in doc:
            raise InvalidSpec(f"{path}: missing 'out'")
        inputs = doc["inputs"]
        if (not isinstance(inputs, list)
                or any(not isinstance(p, str) for p in inputs)):
            raise InvalidSpec(f"{path}: 'inputs' must be a list of paths")

        base = path.parent
        out = str(base / doc["out"])
        fmt = doc.get("format")
        if fmt is None:
            suffix = Path(out).suffix.lstrip(".").lower()
            if suffix not in _FORMATS:
                raise InvalidSpec(
                    f"{path}: cannot infer the format from {doc['out']!r}; "
                    f"give 'format' as one of {_FORMATS}")
            fmt = suffix
        envelope = doc.get("envelope")
        if envelope is not None:
            envelope = load_envelope(base / envelope)
        kwargs = {}
        if "panels" in doc:
            kwargs["panels"] = tuple(doc["panels"])
        if "tail_fraction" in doc:
            kwargs["tail_fraction"] = float(doc["tail_fraction"])
        for flag in ("logx", "logy"):
            if flag in doc:
                if not isinstance(doc[flag], bool):
                    raise InvalidSpec(f"{path}: {flag!r} must be a boolean")
                kwargs[flag] = doc[flag]
        return cls(inputs=tuple(str(base / p) for p in inputs), out=out,
                   format=fmt, envelope=envelope, **kwargs)


def load_envelope(path) -> EnvelopeSpec:
    """Read envelope parameters from a small JSON constants file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise InvalidSpec(f"envelope file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise InvalidSpec(f"{path}: the envelope must be a JSON object")
    unknown = sorted(set(doc) - _ENVELOPE_KEYS)
    if unknown:
        raise InvalidSpec(f"{path}: unknown envelope keys {unknown}")
    missing = [k for k in ("sigma", "nu", "epsilon") if k not in doc]
    if missing:
        raise InvalidSpec(f"{path}: missing envelope fields {missing}")
    try:
        return EnvelopeSpec(sigma=float(doc["sigma"]), nu=float(doc["nu"]),
                            epsilon=float(doc["epsilon"]),
                            scale=float(doc.get("scale", 1.0)))
    except InvalidSpec as exc:
        raise InvalidSpec(f"{path}: {exc}") from None

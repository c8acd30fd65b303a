"""Reading quality curves from native or figure-style JSON documents."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, ParseError, ValidationError
from .series import AnalysisWindow, TimeSeries

log = logging.getLogger(__name__)

__all__ = [
    "SeriesBundle",
    "parse_native_json",
    "parse_figure_json",
    "load",
    "serialize_native",
]

OVERLAY_ROLE = "overlay"


@dataclass(frozen=True)
class SeriesBundle:
    series: tuple[TimeSeries, ...]
    source: dict = field(default_factory=dict)
    window: AnalysisWindow | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        if not self.series:
            raise ValidationError("bundle contains no series")
        names = [s.name for s in self.series]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValidationError(f"duplicate series names: {sorted(dup)}")

    def __iter__(self):
        return iter(self.series)

    def __len__(self):
        return len(self.series)

    def names(self):
        return [s.name for s in self.series]


def _decode(document) -> object:
    if isinstance(document, (dict, list)):  # already decoded
        return document
    if isinstance(document, (bytes, bytearray)):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not UTF-8: {exc}") from None
    try:
        return json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}",
            exc.lineno,
            exc.colno,
        ) from None


def _number_list(obj, what):
    if not isinstance(obj, list):
        raise ValidationError(f"{what} must be an array of numbers")
    for i, v in enumerate(obj):
        # bool is an int subclass, reject it explicitly
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValidationError(f"{what}[{i}] is not a number: {v!r}")
    return [float(v) for v in obj]


def _window(obj):
    if obj is None:
        return None
    if not isinstance(obj, dict) or "t0" not in obj or "t1" not in obj:
        raise ValidationError('window must be an object {"t0": ..., "t1": ...}')
    t0, t1 = _number_list([obj["t0"], obj["t1"]], "window")
    try:
        return AnalysisWindow(t0, t1)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def parse_native_json(document, source=None) -> SeriesBundle:
    """Parse ``{"series": [{"name", "t", "q"}, ...], "window"?: {...}}``."""
    doc = _decode(document)
    if not isinstance(doc, dict) or not isinstance(doc.get("series"), list):
        raise FormatError('native document needs a top-level "series" array')
    out = []
    for i, entry in enumerate(doc["series"]):
        if not isinstance(entry, dict):
            raise ValidationError(f"series[{i}] is not an object")
        name = entry.get("name")
        if not isinstance(name, str):
            raise ValidationError(f"series[{i}] lacks a string name")
        for key in ("t", "q"):
            if key not in entry:
                raise ValidationError(f"series {name!r} lacks {key!r}")
        t = _number_list(entry["t"], f"series {name!r} t")
        q = _number_list(entry["q"], f"series {name!r} q")
        out.append(TimeSeries(name, t, q))
    src = {"format": "native"}
    src.update(source or {})
    return SeriesBundle(out, src, _window(doc.get("window")))


def parse_figure_json(document, source=None) -> SeriesBundle:
    """Parse a plot-figure document: every trace in ``data`` with ``x``/``y``.

    Traces lacking both arrays are skipped with a warning, as are overlay
    traces this package writes itself (``meta.role == "overlay"``).
    """
    doc = _decode(document)
    if not isinstance(doc, dict) or not isinstance(doc.get("data"), list):
        raise FormatError('figure document needs a top-level "data" array')
    out, warnings = [], []
    for i, trace in enumerate(doc["data"]):
        if not isinstance(trace, dict):
            warnings.append(f"data[{i}] is not an object; skipped")
            continue
        meta = trace.get("meta")
        if isinstance(meta, dict) and meta.get("role") == OVERLAY_ROLE:
            continue
        has_x, has_y = "x" in trace, "y" in trace
        if not has_x and not has_y:
            warnings.append(f"data[{i}] has no x/y arrays; skipped")
            continue
        name = trace.get("name")
        if not isinstance(name, str):
            name = f"trace-{i}"
        if not (has_x and has_y):
            raise ValidationError(f"trace {name!r} lacks {'y' if has_x else 'x'}")
        x = _number_list(trace["x"], f"trace {name!r} x")
        y = _number_list(trace["y"], f"trace {name!r} y")
        if len(x) != len(y):
            raise ValidationError(
                f"trace {name!r}: x has {len(x)} entries, y has {len(y)}"
            )
        out.append(TimeSeries(name, x, y))
    for w in warnings:
        log.warning(w)
    if not out:
        raise FormatError("figure document contains no usable traces")
    src = {"format": "figure"}
    src.update(source or {})
    return SeriesBundle(out, src, None, tuple(warnings))


def load(path, format="auto") -> SeriesBundle:
    """Read ``path`` and parse it as ``native``, ``figure`` or ``auto``."""
    data = Path(path).read_bytes()
    src = {"path": str(path)}
    if format == "native":
        return parse_native_json(data, src)
    if format == "figure":
        return parse_figure_json(data, src)
    if format != "auto":
        raise ValueError(f"unknown format {format!r}")
    try:
        return parse_native_json(data, src)
    except ParseError:
        raise
    except (FormatError, ValidationError) as native_err:
        try:
            return parse_figure_json(data, src)
        except (FormatError, ValidationError) as figure_err:
            raise FormatError(
                f"input matches neither schema; native: {native_err}; figure: {figure_err}"
            ) from None


def serialize_native(bundle: SeriesBundle) -> bytes:
    """Inverse of :func:`parse_native_json`; floats written with ``repr`` so
    they round-trip bit-exactly."""
    doc = {
        "series": [
            {"name": s.name, "t": s.t.tolist(), "q": s.q.tolist()} for s in bundle.series
        ]
    }
    if bundle.window is not None:
        doc["window"] = {"t0": float(bundle.window.t0), "t1": float(bundle.window.t1)}
    return json.dumps(doc, separators=(",", ":"), allow_nan=False).encode("utf-8")

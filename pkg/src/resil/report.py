"""Report bundle and its three emitters: JSON report, static HTML, figure JSON."""
from __future__ import annotations

import html
import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .ingest import OVERLAY_ROLE

__all__ = ["AnalysisReport", "to_json", "to_html", "emit_figure_json", "load_schema",
           "SCHEMA_VERSION"]

SCHEMA_VERSION = "1"
SIG_DIGITS = 12
ANNOTATION_DECIMALS = 4

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
           "#7f7f7f", "#bcbd22", "#17becf"]
LABELS = {"rr": "RR", "ra": "RA", "r": "R", "ac": "AC", "aucd": "AUC-D", "irm": "IRM",
          "tapl": "TAPL", "rapi": "RAPI"}
ANNOTATION_ORDER = ("rr", "ra", "r", "ac", "aucd", "irm", "tapl", "rapi")


@dataclass
class AnalysisReport:
    config: dict
    inputs: dict
    preprocessing: dict
    dips: list
    metrics: dict
    segmentations: list = field(default_factory=list)
    antifragility: dict | None = None
    warnings: list = field(default_factory=list)
    tool_version: str = ""
    timestamp: str | None = None
    timings: dict | None = None

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "config": self.config,
            "inputs": self.inputs,
            "preprocessing": self.preprocessing,
            "dips": self.dips,
            "metrics": self.metrics,
            "warnings": self.warnings,
        }
        if self.segmentations:
            d["segmentations"] = self.segmentations
        if self.antifragility is not None:
            d["antifragility"] = self.antifragility
        if self.timings is not None:
            d["timings"] = self.timings
        return d

    def series_names(self):
        return [s["name"] for s in self.inputs["series"]]


def _round_floats(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite number in report: {obj}")
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def to_json(report: AnalysisReport) -> bytes:
    """Deterministic JSON: sorted keys, floats rounded to 12 significant digits."""
    doc = _round_floats(report.to_dict())
    return (json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n").encode("utf-8")


def load_schema() -> dict:
    text = resources.files("resil").joinpath("schema/report.schema.json").read_text("utf-8")
    return json.loads(text)


# -- figure JSON ---------------------------------------------------------------

def _overlay(name, x, y, kind):
    return {"x": list(x), "y": list(y), "name": name, "mode": "lines",
            "meta": {"role": OVERLAY_ROLE, "kind": kind}}


def emit_figure_json(report: AnalysisReport) -> bytes:
    """Figure document in the trace schema :func:`resil.ingest.parse_figure_json`
    reads. Input series are written bit-exact; metric overlays are tagged so
    re-ingestion skips them."""
    data = [{"x": s["t"], "y": s["q"], "name": s["name"], "mode": "lines"}
            for s in report.inputs["series"]]
    t_of = {s["name"]: s["t"] for s in report.inputs["series"]}
    for p in report.preprocessing.get("series", []):
        data.append(_overlay(f"{p['name']}:processed", t_of[p["name"]], p["q"], "processed"))
    for m in report.metrics.get("agnostic", []):
        name = m["series"]
        if "kernel_auc" in m:
            k = m["kernel_auc"]
            data.append(_overlay(f"{name}:kernel_auc", k["t"], k["values"], "kernel_auc"))
        if "derivatives" in m:
            d = m["derivatives"]
            data.append(_overlay(f"{name}:dQ", d["t"], d["dQ"], "derivative"))
            data.append(_overlay(f"{name}:d2Q", d["t"], d["d2Q"], "derivative"))
    shapes = []
    theta = report.config.get("threshold")
    if theta is not None:
        x0 = min(s["t"][0] for s in report.inputs["series"])
        x1 = max(s["t"][-1] for s in report.inputs["series"])
        shapes.append({"type": "line", "x0": x0, "x1": x1, "y0": theta,
                       "y1": theta, "line": {"color": "black", "dash": "dash"}})
    for d in report.dips:
        shapes.append({"type": "rect", "x0": d["t_start"], "x1": d["t_end"], "y0": 0, "y1": 1,
                       "opacity": 0.15, "name": f"{d['series']}:dip{d['index']}"})
    doc = {"data": data, "layout": {"title": {"text": "Resilience"}, "shapes": shapes}}
    return json.dumps(doc, separators=(",", ":"), allow_nan=False).encode("utf-8")


# -- HTML ----------------------------------------------------------------------

def _fmt(v, nd=2):
    return f"{v:.{nd}f}"


def _shown(v):
    # format the value as stored in the JSON report, so both outputs agree
    return f"{_round_floats(float(v)):.{ANNOTATION_DECIMALS}f}"


def annotation_text(values: dict) -> str:
    parts = []
    for key in ANNOTATION_ORDER:
        if key in values:
            v = values[key]
            shown = "n/a" if v is None else _shown(v)
            parts.append(f"{LABELS[key]}={shown}")
    return "(" + ", ".join(parts) + ")"


class _Axes:
    def __init__(self, x0, x1, y0, y1, width=900, height=380, pad=(60, 20, 20, 40)):
        self.x0, self.x1 = x0, x1 if x1 > x0 else x0 + 1.0
        self.y0, self.y1 = y0, y1 if y1 > y0 else y0 + 1.0
        self.w, self.h = width, height
        self.left, self.right, self.top, self.bottom = pad

    def px(self, x):
        span = self.w - self.left - self.right
        return self.left + (x - self.x0) / (self.x1 - self.x0) * span

    def py(self, y):
        span = self.h - self.top - self.bottom
        return self.h - self.bottom - (y - self.y0) / (self.y1 - self.y0) * span

    def points(self, xs, ys):
        return " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in zip(xs, ys))

    def frame(self, ylabel):
        out = [
            f'<rect x="{self.left}" y="{self.top}" width="{self.w - self.left - self.right}" '
            f'height="{self.h - self.top - self.bottom}" fill="none" stroke="#888"/>'
        ]
        for i in range(5):
            yv = self.y0 + (self.y1 - self.y0) * i / 4
            xv = self.x0 + (self.x1 - self.x0) * i / 4
            out.append(f'<text x="{self.left - 6}" y="{_fmt(self.py(yv) + 4)}" '
                       f'text-anchor="end" font-size="11">{yv:.3g}</text>')
            out.append(f'<text x="{_fmt(self.px(xv))}" y="{self.h - self.bottom + 16}" '
                       f'text-anchor="middle" font-size="11">{xv:.4g}</text>')
        out.append(f'<text x="14" y="{self.top + 12}" font-size="12">{html.escape(ylabel)}</text>')
        return out


def _main_chart(report, colors):
    series = report.inputs["series"]
    xs = [x for s in series for x in (s["t"][0], s["t"][-1])]
    ax = _Axes(min(xs), max(xs), 0.0, 1.0)
    svg = [f'<svg xmlns="http://www.w3.org/2000/svg" class="chart main" width="{ax.w}" '
           f'height="{ax.h}" viewBox="0 0 {ax.w} {ax.h}">']
    svg += ax.frame("Q(t)")
    for d in report.dips:
        c = colors[d["series"]]
        x0, x1 = ax.px(d["t_start"]), ax.px(d["t_end"])
        svg.append(
            f'<rect class="dip" data-series="{html.escape(d["series"])}" data-dip="{d["index"]}" '
            f'x="{_fmt(x0)}" y="{ax.top}" width="{_fmt(x1 - x0)}" '
            f'height="{ax.h - ax.top - ax.bottom}" fill="{c}" fill-opacity="0.12"/>'
        )
    processed = {p["name"]: p["q"] for p in report.preprocessing.get("series", [])}
    for s in series:
        c = colors[s["name"]]
        faded = ' stroke-opacity="0.35"' if s["name"] in processed else ""
        svg.append(f'<polyline class="series" data-series="{html.escape(s["name"])}" '
                   f'fill="none" stroke="{c}" stroke-width="2"{faded} '
                   f'points="{ax.points(s["t"], s["q"])}"/>')
        if s["name"] in processed:
            svg.append(f'<polyline class="processed" fill="none" stroke="{c}" stroke-width="2" '
                       f'points="{ax.points(s["t"], processed[s["name"]])}"/>')
    for m in report.metrics.get("agnostic", []):
        if "kernel_auc" in m:
            k = m["kernel_auc"]
            svg.append(f'<polyline class="kernel-auc" fill="none" stroke="{colors[m["series"]]}" '
                       f'stroke-width="1.5" stroke-dasharray="2 2" '
                       f'points="{ax.points(k["t"], k["values"])}"/>')
    theta = report.config.get("threshold")
    if theta is not None:
        y = _fmt(ax.py(theta))
        svg.append(f'<line class="threshold" data-value="{theta!r}" x1="{ax.left}" '
                   f'x2="{ax.w - ax.right}" y1="{y}" y2="{y}" stroke="black" '
                   f'stroke-dasharray="6 4"/>')
        svg.append(f'<text x="{ax.w - ax.right - 4}" y="{_fmt(ax.py(theta) - 4)}" '
                   f'text-anchor="end" font-size="11">&#952; = {theta!r}</text>')
    rows = {(r["series"], r["dip_index"]): r for r in report.metrics.get("dip", [])}
    for d in report.dips:
        row = rows.get((d["series"], d["index"]))
        if row is None:
            continue
        c = colors[d["series"]]
        x = _fmt(ax.px(d["t_min"]))
        if "r" in row["values"]:
            svg.append(f'<line class="robustness" x1="{x}" x2="{x}" '
                       f'y1="{_fmt(ax.py(d["q_before"]))}" y2="{_fmt(ax.py(d["q_min"]))}" '
                       f'stroke="{c}" stroke-dasharray="4 3"/>')
        svg.append(
            f'<text class="dip-annotation" data-series="{html.escape(d["series"])}" '
            f'data-dip="{d["index"]}" x="{x}" y="{_fmt(min(ax.py(d["q_min"]) + 14, ax.h - ax.bottom - 4))}" '
            f'text-anchor="middle" font-size="10" fill="{c}">'
            f'{html.escape(annotation_text(row["values"]))}</text>'
        )
    svg.append("</svg>")
    return svg


def _derivative_chart(report, colors):
    entries = [m for m in report.metrics.get("agnostic", []) if "derivatives" in m]
    if not entries:
        return []
    xs = [x for m in entries for x in m["derivatives"]["t"]]
    ys = [y for m in entries for key in ("dQ", "d2Q") for y in m["derivatives"][key]]
    lo, hi = min(ys), max(ys)
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    ax = _Axes(min(xs), max(xs), lo - pad, hi + pad, height=260)
    svg = [f'<svg xmlns="http://www.w3.org/2000/svg" class="chart derivatives" width="{ax.w}" '
           f'height="{ax.h}" viewBox="0 0 {ax.w} {ax.h}">']
    svg += ax.frame("dQ, d2Q")
    for m in entries:
        d, c = m["derivatives"], colors[m["series"]]
        svg.append(f'<polyline class="dQ" fill="none" stroke="{c}" '
                   f'points="{ax.points(d["t"], d["dQ"])}"/>')
        svg.append(f'<polyline class="d2Q" fill="none" stroke="{c}" stroke-dasharray="1 3" '
                   f'points="{ax.points(d["t"], d["d2Q"])}"/>')
    svg.append("</svg>")
    return svg


def _alpha_cell(score):
    if score["alpha"] is None:
        return f'<td title="{html.escape(score.get("reason", ""))}">not computable</td>'
    return f'<td>{_shown(score["alpha"])}</td>'


def _antifragility_section(report, colors):
    af = report.antifragility
    if not af:
        return []
    metrics = af["metrics"]
    out = ["<h2>Antifragility</h2>", "<table class=\"antifragility\">",
           "<tr><th>system</th>" + "".join(f"<th>&#945; {LABELS[k]}</th>" for k in metrics)
           + "<th>&#945; mean</th><th>class</th></tr>"]
    for sysrow in af["systems"]:
        name = html.escape(sysrow["series"])
        cells = "".join(_alpha_cell(s) for s in sysrow["scores"])
        mean = sysrow["mean"]
        out.append(f"<tr><td style=\"color:{colors[sysrow['series']]}\">{name}</td>{cells}"
                   f"{_alpha_cell(mean)}<td>{mean['classification']}</td></tr>")
    out.append("</table>")
    vals = [s["mean"]["alpha"] for s in af["systems"] if s["mean"]["alpha"] is not None]
    if vals:
        ax = _Axes(0.0, 1.0, 0.0, max(1.0, max(vals)) * 1.1, height=200)
        svg = [f'<svg xmlns="http://www.w3.org/2000/svg" class="chart alpha" width="{ax.w}" '
               f'height="{ax.h}" viewBox="0 0 {ax.w} {ax.h}">']
        svg += ax.frame("mean alpha")
        for s in af["systems"]:
            a = s["mean"]["alpha"]
            if a is None:
                continue
            y = _fmt(ax.py(a))
            svg.append(f'<line class="alpha-mean" data-series="{html.escape(s["series"])}" '
                       f'x1="{ax.left}" x2="{ax.w - ax.right}" y1="{y}" y2="{y}" '
                       f'stroke="{colors[s["series"]]}" stroke-dasharray="8 4"/>')
        svg.append("</svg>")
        out += svg
    out.append('<p class="legend">Dashed lines: mean antifragility per system, averaged over '
               + ", ".join(LABELS[k] for k in metrics)
               + ". 0 = fragile, (0, 1) = mixed, &#8805; 1 = antifragile.</p>")
    return out


def to_html(report: AnalysisReport) -> bytes:
    """Single self-contained HTML page with inline SVG charts."""
    names = report.series_names()
    colors = {n: PALETTE[i % len(PALETTE)] for i, n in enumerate(names)}
    legend = "".join(
        f'<span class="legend-item" style="color:{colors[n]}">&#9632; {html.escape(n)}</span> '
        for n in names
    )
    body = [
        "<!DOCTYPE html>",
        '<html lang="en"><head><meta charset="utf-8"><title>Resilience report</title>',
        "<style>body{font-family:sans-serif;margin:1.5em}table{border-collapse:collapse}"
        "td,th{border:1px solid #ccc;padding:2px 8px}.legend-item{margin-right:1em}</style>",
        "</head><body>",
        "<h1>Resilience report</h1>",
        f'<div class="legend">{legend}</div>',
    ]
    body += _main_chart(report, colors)
    desc = []
    if report.config.get("threshold") is not None:
        desc.append("dashed black line: threshold")
    if report.dips:
        desc.append("shaded: detected dips; dashed vertical: robustness drop; "
                    "labels: per-dip metric tuples")
    if any("kernel_auc" in m for m in report.metrics.get("agnostic", [])):
        desc.append("dotted: kernel-weighted AUC")
    if desc:
        body.append('<p class="legend">' + "; ".join(desc) + ".</p>")
    body += _derivative_chart(report, colors)
    body += _antifragility_section(report, colors)
    if report.warnings:
        body.append("<h2>Warnings</h2><ul>"
                    + "".join(f"<li>{html.escape(w)}</li>" for w in report.warnings) + "</ul>")
    body.append("</body></html>")
    return ("\n".join(body) + "\n").encode("utf-8")

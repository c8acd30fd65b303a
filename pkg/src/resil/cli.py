"""Command-line entry point.

``resil [analyze] --input run.json --auc --threshold 0.8 --out-json r.json``
runs the analysis pipeline; ``resil fixture --shape v --out v.json`` writes a
synthetic input curve.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .antifragility import DEFAULT_METRICS
from .errors import ResilError
from .fixtures import SHAPES, generate_fixture
from .ingest import load
from .pipeline import AnalysisConfig, DIP_METRIC_CHOICES, analyze
from .report import emit_figure_json, to_html, to_json
from .segmentation import DEFAULT_K_MAX

log = logging.getLogger("resil")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    input: str
    format: str
    analysis: AnalysisConfig
    out_json: str | None = None
    out_html: str | None = None
    out_figure: str | None = None
    dry_run: bool = False
    verbose: int = 0


def _csv(choices):
    def parse(text):
        items = [x.strip() for x in text.split(",") if x.strip()]
        if "all" in items:
            return tuple(choices)
        bad = [x for x in items if x not in choices]
        if bad:
            raise argparse.ArgumentTypeError(f"invalid choice(s) {bad}; pick from {list(choices)}")
        return tuple(dict.fromkeys(items))
    return parse


def _window(text):
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("window must look like T0:T1") from None
    return (a, b)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("RESIL_SEED")
    p = _Parser(
        prog="resil",
        description="Resilience and antifragility metrics for normalized QoS time series.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"resil {__version__}")
    g = p.add_argument_group("input")
    g.add_argument("--input", required=True, help="input JSON file")
    g.add_argument("--format", choices=("auto", "native", "figure"), default="auto",
                   help="input schema")
    g.add_argument("--window", type=_window, default=None, metavar="T0:T1",
                   help="analysis window; unset uses the document window or full extent")
    g = p.add_argument_group("preprocessing")
    g.add_argument("--filter-delta", type=float, default=None,
                   help="value-update filter threshold in (0, 1]")
    g.add_argument("--smooth", action="store_true", help="piecewise-linear smoothing")
    g.add_argument("--smooth-max-segments", type=int, default=DEFAULT_K_MAX,
                   help="segment cap for smoothing")
    g = p.add_argument_group("dip-agnostic metrics")
    g.add_argument("--auc", action="store_true", help="AUC and kernel-weighted AUC trace")
    g.add_argument("--kernel", choices=("uniform", "exp", "inverse"), default="uniform",
                   help="recency weighting for the kernel AUC trace")
    g.add_argument("--half-life", type=float, default=None, help="exp kernel half-life")
    g.add_argument("--kernel-scale", type=float, default=None, help="inverse kernel scale")
    g.add_argument("--threshold", type=float, default=None, help="theta in [0, 1]")
    g.add_argument("--derivatives", action="store_true", help="first and second derivative")
    g = p.add_argument_group("dips")
    g.add_argument("--dips", nargs="?", const="max", default=None,
                   choices=("manual", "max", "threshold", "linreg"),
                   help="dip detection mode; bare --dips selects max")
    g.add_argument("--dips-file", default=None, help='JSON {"dips": [{"t_start", "t_end"}]}')
    g.add_argument("--slope-tol", type=float, default=None,
                   help="steady-state slope bound; unset means 0.01 per mean sample spacing")
    g.add_argument("--max-segments", type=int, default=DEFAULT_K_MAX,
                   help="largest segment count tried by linreg")
    g.add_argument("--search-budget", type=int, default=None,
                   help="segment counts to evaluate; unset means all of them")
    g.add_argument("--dip-metrics", type=_csv(DIP_METRIC_CHOICES), default=(),
                   help="comma list from aucd,r,rr,ac,ra,irm,all")
    g = p.add_argument_group("antifragility")
    g.add_argument("--antifragility", action="store_true", help="antifragility degree per system")
    g.add_argument("--antifragility-metrics", type=_csv(("r", "rr", "ac", "ra", "aucd", "irm")),
                   default=DEFAULT_METRICS, help="comma list from r,rr,ac,ra,aucd,irm")
    g = p.add_argument_group("output")
    g.add_argument("--out-json", default=None, help="JSON report path")
    g.add_argument("--out-html", default=None, help="HTML report path")
    g.add_argument("--out-figure", default=None, help="figure JSON path")
    g.add_argument("--timings", action="store_true",
                   help="record per-stage runtimes (makes the report non-reproducible)")
    g.add_argument("--seed", type=int, default=int(env_seed) if env_seed else 0,
                   help="search seed (env RESIL_SEED)")
    g.add_argument("--dry-run", action="store_true", help="validate config and input only")
    g.add_argument("--verbose", "-v", action="count", default=0, help="repeat for more logging")
    return p


def _read_intervals(path):
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
        return tuple((float(d["t_start"]), float(d["t_end"])) for d in doc["dips"])
    except OSError as exc:
        raise UsageError(f"cannot read dips file: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad dips file {path}: {exc}") from None


def config_from_args(args) -> RunConfig:
    if not (args.out_json or args.out_html or args.out_figure):
        raise UsageError("request at least one output (--out-json, --out-html, --out-figure)")
    if args.dips_file and args.dips != "manual":
        raise UsageError("--dips-file only applies to --dips manual")
    intervals = _read_intervals(args.dips_file) if args.dips_file else None
    analysis = AnalysisConfig(
        window=args.window,
        filter_delta=args.filter_delta,
        smooth=args.smooth,
        smooth_max_segments=args.smooth_max_segments,
        auc=args.auc,
        kernel=args.kernel,
        half_life=args.half_life,
        kernel_scale=args.kernel_scale,
        threshold=args.threshold,
        derivatives=args.derivatives,
        dips=args.dips,
        dip_intervals=intervals,
        slope_tol=args.slope_tol,
        max_segments=args.max_segments,
        search_budget=args.search_budget,
        dip_metrics=tuple(args.dip_metrics),
        antifragility=args.antifragility,
        antifragility_metrics=tuple(args.antifragility_metrics),
        seed=args.seed,
        timings=args.timings,
    )
    analysis.validate()
    return RunConfig(args.input, args.format, analysis, args.out_json, args.out_html,
                     args.out_figure, args.dry_run, args.verbose)


def _write_all(outputs):
    """Write every (path, bytes) pair or none: stage to temp files first."""
    staged = []
    try:
        for path, data in outputs:
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            staged.append((tmp, path))
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def run(config: RunConfig) -> int:
    bundle = load(config.input, config.format)
    if config.dry_run:
        window = config.analysis.window or (
            (bundle.window.t0, bundle.window.t1) if bundle.window else None)
        if window:
            from .series import AnalysisWindow
            w = AnalysisWindow(*window)
            for s in bundle:
                w.check_within(s)
        log.info("dry run: %d series validated", len(bundle))
        return EXIT_OK
    report = analyze(bundle, config.analysis)
    outputs = []
    if config.out_json:
        outputs.append((config.out_json, to_json(report)))
    if config.out_html:
        outputs.append((config.out_html, to_html(report)))
    if config.out_figure:
        outputs.append((config.out_figure, emit_figure_json(report)))
    _write_all(outputs)
    return EXIT_OK


def _fixture_main(argv) -> int:
    p = _Parser(prog="resil fixture", description="Write a synthetic native-schema curve.",
                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--shape", choices=SHAPES, required=True)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="shape parameter, e.g. depth=0.5 (repeatable)")
    p.add_argument("--name", default=None)
    p.add_argument("--seed", type=int, default=int(os.environ.get("RESIL_SEED", 0)))
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    args = p.parse_args(argv)
    params = {}
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            num = float(value)
        except ValueError:
            raise UsageError(f"--param {key}: not a number: {value!r}") from None
        params[key.replace("-", "_")] = int(num) if num.is_integer() and "." not in value else num
    try:
        doc = generate_fixture(args.shape, params, args.seed, args.name)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"invalid fixture parameters: {exc}") from None
    text = json.dumps(doc, separators=(",", ":")) + "\n"
    if args.out:
        _write_all([(args.out, text.encode("utf-8"))])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and argv[0] == "fixture":
            return _fixture_main(argv[1:])
        if argv and argv[0] == "analyze":
            argv = argv[1:]
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.WARNING - 10 * min(args.verbose, 2), format="resil: %(message)s"
        )
        return run(config_from_args(args))
    except (UsageError, ResilError, OSError) as exc:
        print(f"resil: error: {str(exc).splitlines()[0] if str(exc) else exc!r}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except Exception as exc:  # pragma: no cover - defensive
        print(f"resil: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

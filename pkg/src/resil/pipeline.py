"""End-to-end analysis: window -> filters -> metrics -> dips -> antifragility."""
from __future__ import annotations

import os
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .agnostic import Kernel, auc, derivatives, kernel_auc_trace, threshold_stats
from .antifragility import DEFAULT_METRICS, RATE_DEFINITION, alpha, mean_alpha
from .dipmetrics import METRIC_KEYS, dip_metrics, is_value
from .dips import DipConfig, linreg_dips, manual_dips, max_dips, threshold_dips
from .errors import ResilError
from .ingest import SeriesBundle
from .preprocess import FilterConfig, apply_filters
from .report import AnalysisReport
from .segmentation import DEFAULT_K_MAX
from .series import AnalysisWindow, slice_series

__all__ = ["AnalysisConfig", "ConfigError", "analyze", "DIP_METRIC_CHOICES"]

DIP_METRIC_CHOICES = ("aucd", "r", "rr", "ac", "ra", "irm")
ANTIFRAGILITY_CHOICES = ("r", "rr", "ac", "ra", "aucd", "irm")
KERNELS = ("uniform", "exp", "inverse")


class ConfigError(ResilError, ValueError):
    """Inconsistent or incomplete analysis settings."""


@dataclass(frozen=True)
class AnalysisConfig:
    window: tuple[float, float] | None = None
    filter_delta: float | None = None
    smooth: bool = False
    smooth_max_segments: int = DEFAULT_K_MAX
    auc: bool = False
    kernel: str = "uniform"
    half_life: float | None = None
    kernel_scale: float | None = None
    threshold: float | None = None
    derivatives: bool = False
    dips: str | None = None
    dip_intervals: tuple[tuple[float, float], ...] | None = None
    slope_tol: float | None = None
    max_segments: int = DEFAULT_K_MAX
    search_budget: int | None = None
    dip_metrics: tuple[str, ...] = ()
    antifragility: bool = False
    antifragility_metrics: tuple[str, ...] = DEFAULT_METRICS
    seed: int = 0
    timings: bool = False

    def validate(self):
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ConfigError(f"window needs t0 < t1, got {self.window}")
        if self.filter_delta is not None and not 0 < self.filter_delta <= 1:
            raise ConfigError("--filter-delta must lie in (0, 1]")
        if self.smooth_max_segments < 1 or self.max_segments < 1:
            raise ConfigError("segment caps must be >= 1")
        if self.search_budget is not None and self.search_budget < 1:
            raise ConfigError("--search-budget must be >= 1")
        if self.kernel not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kernel!r}")
        if self.kernel == "exp" and not (self.half_life and self.half_life > 0):
            raise ConfigError("--kernel exp needs --half-life > 0")
        if self.kernel == "inverse" and not (self.kernel_scale and self.kernel_scale > 0):
            raise ConfigError("--kernel inverse needs --kernel-scale > 0")
        if self.threshold is not None and not 0 <= self.threshold <= 1:
            raise ConfigError("--threshold must lie in [0, 1]")
        bad = set(self.dip_metrics) - set(METRIC_KEYS)
        if bad:
            raise ConfigError(f"unknown dip metrics: {sorted(bad)}")
        bad = set(self.antifragility_metrics) - set(ANTIFRAGILITY_CHOICES)
        if bad:
            raise ConfigError(f"unknown antifragility metrics: {sorted(bad)}")
        if (self.dip_metrics or self.antifragility) and self.dips is None:
            raise ConfigError("dip-dependent metrics need a dip mode (--dips)")
        if self.dips == "threshold" and self.threshold is None:
            raise ConfigError("--dips threshold needs --threshold")
        if self.dips == "manual" and self.dip_intervals is None:
            raise ConfigError("--dips manual needs --dips-file")
        if self.slope_tol is not None and self.slope_tol < 0:
            raise ConfigError("--slope-tol must be >= 0")
        if self.antifragility and not self.antifragility_metrics:
            raise ConfigError("--antifragility needs at least one metric")
        return self

    def kernel_obj(self) -> Kernel:
        if self.kernel == "exp":
            return Kernel.exponential(self.half_life)
        if self.kernel == "inverse":
            return Kernel.inverse(self.kernel_scale)
        return Kernel.uniform()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window) if self.window else None
        d["dip_intervals"] = [list(iv) for iv in self.dip_intervals] if self.dip_intervals else None
        d["dip_metrics"] = list(self.dip_metrics)
        d["antifragility_metrics"] = list(self.antifragility_metrics)
        return d


def _undef(v):
    return None if not is_value(v) else float(v)


@dataclass
class _Clock:
    enabled: bool
    stages: dict = field(default_factory=dict)

    def run(self, key, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        if self.enabled:
            self.stages[key] = self.stages.get(key, 0.0) + time.perf_counter() - t0
        return out


def _detect(series, cfg: AnalysisConfig, clock):
    mode = cfg.dips
    key = f"dips:{mode}:{series.name}"
    if mode == "manual":
        return clock.run(key, manual_dips, series, cfg.dip_intervals), None
    if mode == "max":
        return clock.run(key, max_dips, series), None
    if mode == "threshold":
        return clock.run(key, threshold_dips, series, cfg.threshold), None
    dcfg = DipConfig(
        mode="linreg",
        slope_tol=cfg.slope_tol,
        k_max=cfg.max_segments,
        budget=cfg.search_budget,
        seed=cfg.seed,
    )
    return clock.run(key, linreg_dips, series, dcfg)


def analyze(bundle: SeriesBundle, cfg: AnalysisConfig) -> AnalysisReport:
    """Run every requested analysis on every series of ``bundle``."""
    cfg.validate()
    clock = _Clock(cfg.timings)
    warnings = list(bundle.warnings)
    window = AnalysisWindow(*cfg.window) if cfg.window else bundle.window
    filters = FilterConfig(cfg.filter_delta, cfg.smooth, cfg.smooth_max_segments)

    inputs, processed, agnostic, dips_out, dip_rows, segs, systems = [], [], [], [], [], [], []
    for raw in bundle.series:
        s = slice_series(raw, window) if window else raw
        inputs.append({
            "name": s.name,
            "n_samples": len(s),
            "window": {"t0": s.t0, "t1": s.t1},
            "t": s.t.tolist(),
            "q": s.q.tolist(),
        })
        if filters.active:
            s, notes = clock.run(f"preprocess:{s.name}", apply_filters, s, filters, cfg.seed)
            processed.append({"name": s.name, "q": s.q.tolist(), "filters": notes})

        entry = {"series": s.name}
        if cfg.auc:
            entry["auc"] = clock.run(f"auc:{s.name}", auc, s)
            trace = clock.run(f"kernel_auc:{s.name}", kernel_auc_trace, s, cfg.kernel_obj())
            entry["kernel_auc"] = {
                "kernel": trace.meta["kernel"],
                "t": trace.t.tolist(),
                "values": trace.values.tolist(),
            }
        if cfg.threshold is not None:
            st = clock.run(f"threshold:{s.name}", threshold_stats, s, cfg.threshold)
            entry["threshold"] = {
                "theta": st.theta,
                "time_below": st.time_below,
                "episode_count": st.episode_count,
                "episodes": [list(e) for e in st.episodes],
            }
        if cfg.derivatives:
            if len(s) < 3:
                warnings.append(f"{s.name}: derivatives need 3 samples; skipped")
            else:
                d1, d2 = clock.run(f"derivatives:{s.name}", derivatives, s)
                entry["derivatives"] = {"t": d1.t.tolist(), "dQ": d1.values.tolist(),
                                        "d2Q": d2.values.tolist()}
        agnostic.append(entry)

        if cfg.dips is None:
            continue
        dips, seg = _detect(s, cfg, clock)
        if seg is not None:
            segs.append({
                "series": s.name,
                "k": seg.k,
                "breakpoints": list(seg.breakpoints),
                "slopes": seg.slopes.tolist(),
                "intercepts": seg.intercepts.tolist(),
                "sse": seg.sse.tolist(),
                "total_cost": seg.total_cost,
                "evaluated": [{"k": k, "cost": c} for k, c in sorted(seg.evaluated.items())],
            })
        metrics = [clock.run(f"dip_metrics:{s.name}", dip_metrics, s, d) for d in dips]
        for i, (d, m) in enumerate(zip(dips, metrics)):
            dips_out.append({"series": s.name, "index": i, "mode": cfg.dips, **d.to_dict()})
            if cfg.dip_metrics:
                keys = list(cfg.dip_metrics)
                if "irm" in keys:
                    keys += [k for k in ("tapl", "rapi") if k not in keys]
                values, reasons = {}, {}
                for k in keys:
                    v = m.get(k)
                    values[k] = _undef(v)
                    if not is_value(v):
                        reasons[k] = v.reason
                row = {"series": s.name, "dip_index": i, "t_min": d.t_min, "values": values}
                if reasons:
                    row["reasons"] = reasons
                dip_rows.append(row)
        if cfg.antifragility:
            scores = [
                alpha([m.get(k) for m in metrics], k) for k in cfg.antifragility_metrics
            ]
            systems.append({
                "series": s.name,
                "scores": [sc.to_dict() for sc in scores],
                "mean": mean_alpha(scores).to_dict(),
            })

    metrics_section = {"agnostic": agnostic}
    if dip_rows:
        metrics_section["dip"] = dip_rows
    report = AnalysisReport(
        config=cfg.to_dict(),
        inputs={"source": dict(bundle.source), "series": inputs},
        preprocessing={
            "applied": filters.active,
            "scope": "upstream of all metrics and dip detection",
            "order": ["value_update_filter", "linreg_smooth"],
            "series": processed,
        },
        dips=dips_out,
        metrics=metrics_section,
        segmentations=segs,
        antifragility=(
            {
                "metrics": list(cfg.antifragility_metrics),
                "rate_definition": RATE_DEFINITION,
                "systems": systems,
            }
            if cfg.antifragility
            else None
        ),
        warnings=warnings,
        tool_version=__version__,
        timestamp=os.environ.get("SOURCE_DATE_EPOCH"),
        timings=dict(sorted(clock.stages.items())) if cfg.timings else None,
    )
    return report

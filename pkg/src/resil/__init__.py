"""Resilience metrics and antifragility scoring for normalized
quality-of-service time series."""

__version__ = "0.1.0"

from .series import AnalysisWindow, MetricSeries, TimeSeries, interpolate, slice_series  # noqa: E402
from .ingest import SeriesBundle, load, parse_figure_json, parse_native_json  # noqa: E402
from .agnostic import Kernel, auc, derivatives, kernel_auc_trace, threshold_stats  # noqa: E402
from .segmentation import Segmentation, fit_fixed_k, select_k  # noqa: E402
from .dips import Dip, DipConfig, linreg_dips, manual_dips, max_dips, threshold_dips  # noqa: E402
from .dipmetrics import DipMetrics, NotComputable, dip_metrics  # noqa: E402
from .antifragility import AntifragilityScore, alpha, mean_alpha  # noqa: E402
from .pipeline import AnalysisConfig, analyze  # noqa: E402
from .report import AnalysisReport, emit_figure_json, to_html, to_json  # noqa: E402

__all__ = [
    "AnalysisWindow", "MetricSeries", "TimeSeries", "interpolate", "slice_series",
    "SeriesBundle", "load", "parse_figure_json", "parse_native_json",
    "Kernel", "auc", "derivatives", "kernel_auc_trace", "threshold_stats",
    "Segmentation", "fit_fixed_k", "select_k",
    "Dip", "DipConfig", "linreg_dips", "manual_dips", "max_dips", "threshold_dips",
    "DipMetrics", "NotComputable", "dip_metrics",
    "AntifragilityScore", "alpha", "mean_alpha",
    "AnalysisConfig", "analyze",
    "AnalysisReport", "emit_figure_json", "to_html", "to_json",
]

"""Noise filters applied before any metric is computed."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError
from .segmentation import DEFAULT_K_MAX, select_k
from .series import TimeSeries

__all__ = ["FilterConfig", "value_update_filter", "linreg_smooth", "apply_filters"]


@dataclass(frozen=True)
class FilterConfig:
    update_threshold: float | None = None
    smoothing: bool = False
    max_segments: int = DEFAULT_K_MAX

    def __post_init__(self):
        d = self.update_threshold
        if d is not None and not 0.0 < d <= 1.0:
            raise ValueError(f"update threshold must lie in (0, 1], got {d}")
        if self.max_segments < 1:
            raise ValueError(f"max_segments must be >= 1, got {self.max_segments}")

    @property
    def active(self) -> bool:
        return self.update_threshold is not None or self.smoothing


def value_update_filter(series: TimeSeries, delta: float) -> TimeSeries:
    """Hold the last accepted value until a sample moves more than ``delta``
    away from it. The first sample is always accepted."""
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    q = series.q
    out = np.empty_like(q)
    held = q[0]
    for i, v in enumerate(q):
        if abs(v - held) > delta:
            held = v
        out[i] = held
    return series.with_values(out)


def linreg_smooth(series: TimeSeries, max_segments: int = DEFAULT_K_MAX, seed: int = 0):
    """Replace values by the best piecewise-linear fit (count chosen by
    :func:`~resil.segmentation.select_k`), clamped into [0, 1].

    Returns ``(smoothed_series, segmentation)``.
    """
    seg = select_k(series, k_max=max_segments, budget=max_segments, seed=seed)
    if len(series) < 2 * seg.k:  # pragma: no cover - select_k filters these
        raise DegenerateFitError(f"{len(series)} samples cannot carry {seg.k} segments")
    fitted = np.clip(seg.fitted(series.t), 0.0, 1.0)
    return series.with_values(fitted), seg


def apply_filters(series: TimeSeries, config: FilterConfig, seed: int = 0):
    """Run the enabled filters, value-update first. Returns ``(series, notes)``."""
    notes = {}
    if config.update_threshold is not None:
        series = value_update_filter(series, config.update_threshold)
        notes["value_update_filter"] = {"delta": config.update_threshold}
    if config.smoothing:
        series, seg = linreg_smooth(series, config.max_segments, seed)
        notes["linreg_smooth"] = {"max_segments": config.max_segments, "segments": seg.k}
    return series, notes

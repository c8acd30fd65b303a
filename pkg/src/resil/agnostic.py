"""Metrics that need no dip labels: AUC, recency-weighted AUC, time below a
threshold, and numerical derivatives."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EvaluationError, RangeError
from .series import AnalysisWindow, MetricSeries, TimeSeries, slice_series

__all__ = [
    "Kernel",
    "ThresholdStats",
    "auc",
    "trapezoid_areas",
    "kernel_auc_trace",
    "threshold_stats",
    "below_episodes",
    "derivatives",
]


def trapezoid_areas(t, q) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.diff(t) * 0.5 * (q[:-1] + q[1:])


def auc(series: TimeSeries, window: AnalysisWindow | None = None) -> float:
    """Trapezoidal area under ``series`` over ``window``, divided by the
    window length."""
    if window is not None:
        series = slice_series(series, window)
    length = series.t1 - series.t0
    if length <= 0:
        raise RangeError("zero-length window")
    return float(np.sum(trapezoid_areas(series.t, series.q)) / length)


@dataclass(frozen=True)
class Kernel:
    """Non-increasing weight as a function of sample age.

    Use the constructors :meth:`uniform`, :meth:`exponential`,
    :meth:`inverse` or :meth:`custom`.
    """

    kind: str = "uniform"
    half_life: float | None = None
    scale: float | None = None
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "exponential" and not (self.half_life and self.half_life > 0):
            raise ValueError("exponential kernel needs half_life > 0")
        if self.kind == "inverse" and not (self.scale and self.scale > 0):
            raise ValueError("inverse kernel needs scale > 0")
        if self.kind == "custom" and self.func is None:
            raise ValueError("custom kernel needs a weight function")
        if self.kind not in ("uniform", "exponential", "inverse", "custom"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def exponential(cls, half_life):
        return cls("exponential", half_life=float(half_life))

    @classmethod
    def inverse(cls, scale):
        return cls("inverse", scale=float(scale))

    @classmethod
    def custom(cls, func):
        return cls("custom", func=func)

    def weight(self, age):
        age = np.asarray(age, dtype=float)
        if self.kind == "uniform":
            return np.ones_like(age)
        if self.kind == "exponential":
            return np.exp2(-age / self.half_life)
        if self.kind == "inverse":
            return 1.0 / (1.0 + age / self.scale)
        w = np.asarray(self.func(age), dtype=float)
        if w.shape != age.shape:
            w = np.vectorize(lambda a: float(self.func(a)))(age)
        return w

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.half_life is not None:
            d["half_life"] = self.half_life
        if self.scale is not None:
            d["scale"] = self.scale
        return d


def kernel_auc_trace(series: TimeSeries, kernel: Kernel | None = None) -> MetricSeries:
    """Recency-weighted AUC evaluated at every sample time after the first.

    Each trapezoid interval is weighted by the kernel at the age of its
    midpoint; normalizing by the weighted duration makes the uniform kernel
    return the plain prefix AUC.
    """
    kernel = kernel or Kernel.uniform()
    t, q = series.t, series.q
    areas = trapezoid_areas(t, q)
    dur = np.diff(t)
    mid = 0.5 * (t[:-1] + t[1:])
    ages = t[1:, None] - mid[None, :]
    mask = np.tri(t.size - 1, dtype=bool)
    w = np.where(mask, kernel.weight(np.where(mask, ages, 0.0)), 0.0)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise EvaluationError("kernel produced negative or non-finite weights")
    num = w @ areas
    den = w @ dur
    if np.any(den <= 0):
        raise EvaluationError("all kernel weights vanish at some evaluation time")
    return MetricSeries(f"{series.name}:kernel_auc", t[1:], num / den, {"kernel": kernel.describe()})


@dataclass(frozen=True)
class ThresholdStats:
    theta: float
    time_below: float
    episode_count: int
    episodes: tuple[tuple[float, float], ...]


def below_episodes(series: TimeSeries, theta: float) -> list[tuple[float, float]]:
    """Maximal intervals where the interpolant is strictly below ``theta``.

    Crossing times are linearly interpolated. A curve touching ``theta``
    without dropping below opens no episode.
    """
    t, q = series.t, series.q
    episodes = []
    start = t[0] if q[0] < theta else None
    for j in range(t.size - 1):
        a, b = q[j], q[j + 1]
        if (a < theta) == (b < theta):
            continue
        tc = t[j] + (theta - a) / (b - a) * (t[j + 1] - t[j])
        if a < theta:
            episodes.append((float(start), float(tc)))
            start = None
        else:
            start = tc
    if start is not None:
        episodes.append((float(start), float(t[-1])))
    return [(a, b) for a, b in episodes if b > a]


def threshold_stats(
    series: TimeSeries, theta: float, window: AnalysisWindow | None = None
) -> ThresholdStats:
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if window is not None:
        series = slice_series(series, window)
    eps = below_episodes(series, theta)
    return ThresholdStats(
        float(theta), float(sum(b - a for a, b in eps)), len(eps), tuple(eps)
    )


def derivatives(series: TimeSeries) -> tuple[MetricSeries, MetricSeries]:
    """First and second derivative on the (possibly non-uniform) sample grid.

    First derivative: second-order central differences in the interior,
    one-sided differences at the ends. Second derivative: three-point
    formula in the interior, copied from the neighbour at the ends.
    """
    t, q = series.t, series.q
    if t.size < 3:
        raise ValueError(f"derivatives need at least 3 samples, got {t.size}")
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    s0 = (q[1:-1] - q[:-2]) / h0
    s1 = (q[2:] - q[1:-1]) / h1
    # spacing-weighted mean of the one-sided slopes: the second-order
    # non-uniform central difference, exact zero on constant data
    d1 = np.concatenate(([s0[0]], (h1 * s0 + h0 * s1) / (h0 + h1), [s1[-1]]))
    inner = 2.0 * (s1 - s0) / (h0 + h1)
    d2 = np.concatenate(([inner[0]], inner, [inner[-1]]))
    return (
        MetricSeries(f"{series.name}:dQ", t, d1),
        MetricSeries(f"{series.name}:d2Q", t, d2),
    )

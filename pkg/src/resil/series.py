"""Core time-series types.

A :class:`TimeSeries` is interpreted as the piecewise-linear interpolant of
its samples. Every area, crossing and minimum computed elsewhere in the
package relies on that reading.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError, ValidationError

__all__ = ["TimeSeries", "AnalysisWindow", "MetricSeries", "interpolate", "slice_series"]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Quality values ``q`` in [0, 1] sampled at strictly increasing ``t``.

    Parameters
    ----------
    name : str
        Label of the system or strategy the curve belongs to.
    t : array_like
        Sample times (abstract units).
    q : array_like
        Normalized quality at each sample time.
    """

    name: str
    t: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        t = _frozen(self.t)
        q = _frozen(self.q)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "q", q)
        _validate(self.name, t, q)

    def __len__(self):
        return self.t.size

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.q, other.q)
        )

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def window(self) -> "AnalysisWindow":
        return AnalysisWindow(self.t0, self.t1)

    def with_values(self, q, name=None) -> "TimeSeries":
        return TimeSeries(self.name if name is None else name, self.t, q)


def _validate(name, t, q):
    if t.ndim != 1 or q.ndim != 1:
        raise ValidationError(f"series {name!r}: t and q must be one-dimensional")
    if t.size != q.size:
        raise ValidationError(
            f"series {name!r}: length mismatch (t has {t.size}, q has {q.size})"
        )
    if t.size < 2:
        raise ValidationError(f"series {name!r}: need at least 2 samples, got {t.size}")
    for label, arr in (("t", t), ("q", q)):
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise ValidationError(f"series {name!r}: non-finite {label} at index {bad[0]}")
    bad = np.flatnonzero(np.diff(t) <= 0)
    if bad.size:
        raise ValidationError(
            f"series {name!r}: times not strictly increasing at index {bad[0] + 1}"
        )
    bad = np.flatnonzero((q < 0.0) | (q > 1.0))
    if bad.size:
        i = bad[0]
        raise ValidationError(f"series {name!r}: value {q[i]!r} at index {i} outside [0, 1]")


@dataclass(frozen=True)
class AnalysisWindow:
    t0: float
    t1: float

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise RangeError("window bounds must be finite")
        if not self.t0 < self.t1:
            raise RangeError(f"window requires t0 < t1, got [{self.t0}, {self.t1}]")

    @property
    def length(self) -> float:
        return self.t1 - self.t0

    def check_within(self, series: TimeSeries):
        if self.t0 < series.t0 or self.t1 > series.t1:
            raise RangeError(
                f"window [{self.t0}, {self.t1}] outside domain "
                f"[{series.t0}, {series.t1}] of series {series.name!r}"
            )


@dataclass(frozen=True, eq=False)
class MetricSeries:
    """A derived trace over time; values are not restricted to [0, 1]."""

    name: str
    t: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "t", _frozen(self.t))
        object.__setattr__(self, "values", _frozen(self.values))


def interpolate(series: TimeSeries, t: float) -> float:
    """Value of the linear interpolant at ``t``.

    >>> interpolate(TimeSeries("a", [0, 1], [0.2, 0.8]), 0.25)
    0.35
    """
    if not series.t0 <= t <= series.t1:
        raise RangeError(f"t={t} outside domain [{series.t0}, {series.t1}]")
    i = int(np.searchsorted(series.t, t))
    if series.t[i] == t:
        return float(series.q[i])
    t_lo, t_hi = series.t[i - 1], series.t[i]
    q_lo, q_hi = series.q[i - 1], series.q[i]
    w = (t - t_lo) / (t_hi - t_lo)
    return float(q_lo + w * (q_hi - q_lo))


def slice_series(series: TimeSeries, window: AnalysisWindow) -> TimeSeries:
    """Restrict ``series`` to ``window``, inserting interpolated endpoints."""
    window.check_within(series)
    t, q = series.t, series.q
    inner = (t > window.t0) & (t < window.t1)
    ts = np.concatenate(([window.t0], t[inner], [window.t1]))
    qs = np.concatenate(
        ([interpolate(series, window.t0)], q[inner], [interpolate(series, window.t1)])
    )
    # interpolation stays inside [min, max] of the bracket, but guard rounding
    np.clip(qs, 0.0, 1.0, out=qs)
    return TimeSeries(series.name, ts, qs)


def interpolant_min(series: TimeSeries, t_start: float, t_end: float) -> tuple[float, float]:
    """Minimum of the interpolant over the closed interval; first occurrence wins."""
    part = slice_series(series, AnalysisWindow(t_start, t_end))
    i = int(np.argmin(part.q))
    return float(part.t[i]), float(part.q[i])

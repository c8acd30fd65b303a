"""Dip representation and the four ways of obtaining dips."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .agnostic import below_episodes
from .errors import RangeError, ValidationError
from .segmentation import DEFAULT_K_MAX, select_k
from .series import TimeSeries, interpolant_min, interpolate

__all__ = [
    "Dip",
    "DipConfig",
    "manual_dips",
    "max_dips",
    "local_maxima",
    "threshold_dips",
    "linreg_dips",
    "detect",
    "default_slope_tol",
]

MODES = ("manual", "max", "threshold", "linreg")


@dataclass(frozen=True)
class Dip:
    t_start: float
    t_end: float
    t_min: float
    q_before: float
    q_after: float
    q_min: float
    # which anchor closed the dip: manual, next-maximum, crossing, steady-segment
    convention: str = "manual"

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValidationError(f"dip needs t_start < t_end, got {self.t_start}, {self.t_end}")
        if not self.t_start <= self.t_min <= self.t_end:
            raise ValidationError("dip minimum lies outside the dip")
        for v in (self.q_before, self.q_after, self.q_min):
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"dip value {v} outside [0, 1]")
        if self.q_min > min(self.q_before, self.q_after):
            raise ValidationError("q_min exceeds a boundary value")

    @property
    def length(self) -> float:
        return self.t_end - self.t_start

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DipConfig:
    mode: str = "max"
    theta: float | None = None
    slope_tol: float | None = None
    k_max: int = DEFAULT_K_MAX
    budget: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown dip mode {self.mode!r}")
        if self.theta is not None and not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
        if self.mode == "threshold" and self.theta is None:
            raise ValueError("threshold dips need theta")
        if self.slope_tol is not None and self.slope_tol < 0:
            raise ValueError("slope_tol must be >= 0")


def _dip_over(series, t_start, t_end, q_before, q_after, convention):
    t_min, q_min = interpolant_min(series, t_start, t_end)
    # fitted boundary values can undershoot the raw minimum
    q_before = max(q_before, q_min)
    q_after = max(q_after, q_min)
    return Dip(t_start, t_end, t_min, q_before, q_after, q_min, convention)


def manual_dips(series: TimeSeries, intervals) -> list[Dip]:
    """Dips over user-supplied ``(t_start, t_end)`` intervals."""
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    for a, b in ivs:
        if not a < b:
            raise ValidationError(f"interval ({a}, {b}) needs t_start < t_end")
        if a < series.t0 or b > series.t1:
            raise RangeError(f"interval ({a}, {b}) outside [{series.t0}, {series.t1}]")
    for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
        if a1 < b0:
            raise ValidationError(f"intervals ({a0}, {b0}) and ({a1}, {b1}) overlap")
    return [
        _dip_over(series, a, b, interpolate(series, a), interpolate(series, b), "manual")
        for a, b in ivs
    ]


def local_maxima(q) -> list[int]:
    """Indices of local maxima.

    Runs of equal values are treated as one sample located at the run's first
    index. A run is a maximum when every neighbouring run is lower, so series
    endpoints qualify when they are >= their only neighbour.
    """
    q = np.asarray(q, dtype=float)
    starts = np.flatnonzero(np.concatenate(([True], q[1:] != q[:-1])))
    vals = q[starts]
    m = vals.size
    out = []
    for r in range(m):
        left_ok = r == 0 or vals[r - 1] < vals[r]
        right_ok = r == m - 1 or vals[r + 1] < vals[r]
        if left_ok and right_ok:
            out.append(int(starts[r]))
    return out


def max_dips(series: TimeSeries) -> list[Dip]:
    """One dip between each pair of consecutive local maxima that has at
    least one strictly lower sample in between."""
    t, q = series.t, series.q
    if t.size < 3:
        return []
    peaks = local_maxima(q)
    dips = []
    for a, b in zip(peaks, peaks[1:]):
        inner = q[a + 1 : b]
        if inner.size == 0 or inner.min() >= min(q[a], q[b]):
            continue
        i = a + 1 + int(np.argmin(inner))
        dips.append(
            Dip(float(t[a]), float(t[b]), float(t[i]), float(q[a]), float(q[b]), float(q[i]),
                "next-maximum")
        )
    return dips


def threshold_dips(series: TimeSeries, theta: float) -> list[Dip]:
    """One dip per maximal stretch strictly below ``theta``, bounded by the
    interpolated crossings (or the series ends)."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    dips = []
    for a, b in below_episodes(series, theta):
        qa = theta if a > series.t0 else interpolate(series, a)
        qb = theta if b < series.t1 else interpolate(series, b)
        dips.append(_dip_over(series, a, b, qa, qb, "crossing"))
    return dips


def default_slope_tol(series: TimeSeries) -> float:
    """0.01 quality units per mean sample spacing."""
    return 0.01 / float(np.mean(np.diff(series.t)))


def linreg_dips(series: TimeSeries, config: DipConfig | None = None, segmentation=None):
    """Dips as maximal runs of non-steady segments of the optimal
    piecewise-linear fit. Returns ``(dips, segmentation)``."""
    config = config or DipConfig(mode="linreg")
    seg = segmentation or select_k(series, config.k_max, config.budget, config.seed)
    tol = config.slope_tol if config.slope_tol is not None else default_slope_tol(series)
    t = series.t
    segs = list(seg.segments())
    steady = [abs(s[2]) <= tol for s in segs]
    dips = []
    r = 0
    while r < len(segs):
        if steady[r]:
            r += 1
            continue
        first = r
        while r < len(segs) and not steady[r]:
            r += 1
        last = r - 1
        if first > 0:
            _, b, slope, icpt = segs[first - 1]
            t_start = float(t[b])
            q_before = float(np.clip(slope * t_start + icpt, 0.0, 1.0))
        else:
            t_start = series.t0
            q_before = float(series.q[0])
        if last < len(segs) - 1:
            a, _, slope, icpt = segs[last + 1]
            t_end = float(t[a])
            q_after = float(np.clip(slope * t_end + icpt, 0.0, 1.0))
        else:
            t_end = series.t1
            q_after = float(series.q[-1])
        dips.append(_dip_over(series, t_start, t_end, q_before, q_after, "steady-segment"))
    return dips, seg


def detect(series: TimeSeries, config: DipConfig, intervals=None) -> list[Dip]:
    if config.mode == "manual":
        return manual_dips(series, intervals or [])
    if config.mode == "max":
        return max_dips(series)
    if config.mode == "threshold":
        return threshold_dips(series, config.theta)
    return linreg_dips(series, config)[0]

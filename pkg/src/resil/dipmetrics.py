"""Per-dip resilience metrics.

Metrics that cannot be evaluated for a given dip return a
:class:`NotComputable` value carrying the reason instead of raising.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .agnostic import trapezoid_areas
from .dips import Dip
from .series import AnalysisWindow, TimeSeries, slice_series

__all__ = [
    "NotComputable",
    "DipMetrics",
    "auc_d",
    "robustness",
    "recovery_rate",
    "adaptive_capacity",
    "recovery_ability",
    "tapl",
    "rapi",
    "irm",
    "dip_metrics",
    "METRIC_KEYS",
]


@dataclass(frozen=True)
class NotComputable:
    reason: str

    def __bool__(self):
        return False


def is_value(x) -> bool:
    return not isinstance(x, NotComputable)


def _part(series, dip):
    return slice_series(series, AnalysisWindow(dip.t_start, dip.t_end))


def auc_d(series: TimeSeries, dip: Dip) -> float:
    part = _part(series, dip)
    return float(np.sum(trapezoid_areas(part.t, part.q)) / dip.length)


def robustness(series: TimeSeries, dip: Dip) -> float:
    return float(_part(series, dip).q.min())


def recovery_rate(dip: Dip) -> float:
    return 1.0 / dip.length


def adaptive_capacity(dip: Dip):
    if dip.q_before <= 0.0:
        return NotComputable("q_before is 0")
    return dip.q_after / dip.q_before


def recovery_ability(dip: Dip):
    drop = dip.q_before - dip.q_min
    if drop <= 0.0:
        return NotComputable("no deterioration (q_before == q_min)")
    return (dip.q_after - dip.q_min) / drop


def tapl(series: TimeSeries, dip: Dip) -> float:
    """Directed area between the pre-dip level and the curve, per unit time.
    Negative when the curve runs above the pre-dip level."""
    part = _part(series, dip)
    loss = trapezoid_areas(part.t, dip.q_before - part.q)
    return float(np.sum(loss) / dip.length)


def rapi(series: TimeSeries, dip: Dip):
    """|mean recovery slope| / |mean disruption slope|, split at ``t_min``."""
    if not dip.t_start < dip.t_min < dip.t_end:
        return NotComputable("minimum coincides with a dip boundary")
    if dip.q_before <= dip.q_min:
        return NotComputable("no disruption drop")
    down = (dip.q_min - dip.q_before) / (dip.t_min - dip.t_start)
    up = (dip.q_after - dip.q_min) / (dip.t_end - dip.t_min)
    return abs(up) / abs(down)


def irm(series: TimeSeries, dip: Dip, _factors=None):
    """robustness * rapidity / (tapl + 1) * recovery ability."""
    r, ra, tl, rec = _factors or (
        robustness(series, dip),
        rapi(series, dip),
        tapl(series, dip),
        recovery_ability(dip),
    )
    for name, v in (("rapi", ra), ("recovery_ability", rec)):
        if not is_value(v):
            return NotComputable(f"{name} undefined: {v.reason}")
    if tl + 1.0 <= 0.0:
        return NotComputable("tapl + 1 is not positive")
    return r * ra / (tl + 1.0) * rec


# report keys -> DipMetrics attribute
METRIC_KEYS = {
    "aucd": "auc_d",
    "r": "robustness",
    "rr": "recovery_rate",
    "ac": "adaptive_capacity",
    "ra": "recovery_ability",
    "tapl": "tapl",
    "rapi": "rapi",
    "irm": "irm",
}


@dataclass(frozen=True)
class DipMetrics:
    auc_d: float
    robustness: float
    recovery_rate: float
    adaptive_capacity: float | NotComputable
    recovery_ability: float | NotComputable
    tapl: float
    rapi: float | NotComputable
    irm: float | NotComputable

    def get(self, key: str):
        return getattr(self, METRIC_KEYS.get(key, key))


def dip_metrics(series: TimeSeries, dip: Dip) -> DipMetrics:
    r = robustness(series, dip)
    ra = rapi(series, dip)
    tl = tapl(series, dip)
    rec = recovery_ability(dip)
    return DipMetrics(
        auc_d=auc_d(series, dip),
        robustness=r,
        recovery_rate=recovery_rate(dip),
        adaptive_capacity=adaptive_capacity(dip),
        recovery_ability=rec,
        tapl=tl,
        rapi=ra,
        irm=irm(series, dip, (r, ra, tl, rec)),
    )

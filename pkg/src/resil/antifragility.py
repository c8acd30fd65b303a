"""Antifragility degree over a sequence of per-dip resilience values.

For changes ``d_i = u[i+1] - u[i]``:

* every change negative -> 0 (fragile)
* every change >= 0     -> 1 + mean(d_i / u[i]) (antifragile)
* otherwise             -> share of non-negative changes (mixed)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dipmetrics import NotComputable

__all__ = ["AntifragilityScore", "alpha", "mean_alpha", "classify", "RATE_DEFINITION"]

RATE_DEFINITION = "mean relative increment (u[i+1] - u[i]) / u[i]; zero change counts as upward"
DEFAULT_METRICS = ("r", "rr", "ac")
RANK = {"fragile": 0, "mixed": 1, "antifragile": 2}


@dataclass(frozen=True)
class AntifragilityScore:
    metric_name: str
    alpha: float | None
    n_dips: int
    classification: str
    reason: str | None = None

    @property
    def computable(self) -> bool:
        return self.alpha is not None

    def to_dict(self) -> dict:
        d = {
            "metric": self.metric_name,
            "alpha": self.alpha,
            "n_dips": self.n_dips,
            "classification": self.classification,
        }
        if self.reason is not None:
            d["reason"] = self.reason
        return d


def classify(a: float) -> str:
    if a == 0:
        return "fragile"
    return "mixed" if a < 1 else "antifragile"


def _nc(name, n, reason):
    return AntifragilityScore(name, None, n, "not-computable", reason)


def alpha(values, metric_name: str = "u") -> AntifragilityScore:
    values = list(values)
    n = len(values)
    for i, v in enumerate(values):
        if isinstance(v, NotComputable):
            return _nc(metric_name, n, f"value for dip {i} not computable: {v.reason}")
    u = [float(v) for v in values]
    for i, v in enumerate(u):
        if not math.isfinite(v):
            raise ValueError(f"{metric_name}: non-finite value at dip {i}")
        if v < 0:
            raise ValueError(f"{metric_name}: negative value {v} at dip {i}")
    if n < 2:
        return _nc(metric_name, n, f"needs at least 2 dips, got {n}")
    deltas = [b - a for a, b in zip(u, u[1:])]
    n_down = sum(d < 0 for d in deltas)
    n_up = len(deltas) - n_down
    if n_up == 0:
        return AntifragilityScore(metric_name, 0.0, n, "fragile")
    if n_down == 0:
        rates = []
        for i, d in enumerate(deltas):
            if u[i] > 0:
                rates.append(d / u[i])
            elif d == 0:
                rates.append(0.0)
            else:
                return _nc(metric_name, n, f"improvement from zero at dip {i}")
        return AntifragilityScore(metric_name, 1.0 + sum(rates) / len(rates), n, "antifragile")
    return AntifragilityScore(metric_name, n_up / (n_up + n_down), n, "mixed")


def mean_alpha(scores) -> AntifragilityScore:
    """Arithmetic mean of the computable alphas of one system."""
    scores = list(scores)
    if not scores:
        raise ValueError("mean_alpha needs at least one score")
    ok = [s for s in scores if s.computable]
    skipped = [s.metric_name for s in scores if not s.computable]
    n = max(s.n_dips for s in scores)
    if not ok:
        return _nc("mean", n, "no computable alpha among: " + ", ".join(skipped))
    a = sum(s.alpha for s in ok) / len(ok)
    reason = ("excluded not-computable: " + ", ".join(skipped)) if skipped else None
    return AntifragilityScore("mean", a, n, classify(a), reason)

"""Optimal piecewise-linear segmentation with automatic segment count.

Segment ``r`` covers samples ``b[r-1] .. b[r]`` inclusive, so neighbours share
their boundary sample; each segment gets an independent least-squares line.
The placement for a fixed count is solved exactly by dynamic programming
(see :mod:`resil._kernels`); the count itself is chosen by minimizing a
BIC-style score with a sequential model-based search over integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .errors import DegenerateFitError
from .series import TimeSeries

__all__ = [
    "Segmentation",
    "fit_fixed_k",
    "select_k",
    "bic_cost",
    "line_fit",
    "exhaustive_search",
    "bayesian_search",
]

EPS = 1e-12
PARAMS_PER_SEGMENT = 3
DEFAULT_K_MAX = 12


@dataclass(frozen=True, eq=False)
class Segmentation:
    breakpoints: tuple[int, ...]
    slopes: np.ndarray
    intercepts: np.ndarray
    sse: np.ndarray
    total_cost: float
    # cost(k) for every k the search evaluated
    evaluated: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def total_sse(self) -> float:
        return float(np.sum(self.sse))

    def segments(self):
        """Yield ``(start_index, end_index, slope, intercept)`` per segment."""
        for r in range(self.k):
            yield (
                self.breakpoints[r],
                self.breakpoints[r + 1],
                float(self.slopes[r]),
                float(self.intercepts[r]),
            )

    def fitted(self, t) -> np.ndarray:
        """Fitted value at each sample time.

        A shared boundary sample takes the mean of its two segment fits.
        """
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        for r, (a, b, slope, icpt) in enumerate(self.segments()):
            lo = a + 1 if r > 0 else a
            out[lo : b + 1] = slope * t[lo : b + 1] + icpt
        for r in range(1, self.k):
            b = self.breakpoints[r]
            left = self.slopes[r - 1] * t[b] + self.intercepts[r - 1]
            right = self.slopes[r] * t[b] + self.intercepts[r]
            out[b] = 0.5 * (left + right)
        return out

    def __eq__(self, other):
        if not isinstance(other, Segmentation):
            return NotImplemented
        return (
            self.breakpoints == other.breakpoints
            and np.array_equal(self.slopes, other.slopes)
            and np.array_equal(self.intercepts, other.intercepts)
            and np.array_equal(self.sse, other.sse)
            and self.total_cost == other.total_cost
        )


def line_fit(x, y):
    """Least-squares line through ``(x, y)``; returns ``(slope, intercept, sse)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    slope = float(dx @ (y - ym)) / sxx
    icpt = ym - slope * xm
    resid = y - (slope * x + icpt)
    return slope, float(icpt), float(resid @ resid)


def bic_cost(sse: float, n: int, k: int) -> float:
    return n * math.log(max(sse, 0.0) / n + EPS) + PARAMS_PER_SEGMENT * k * math.log(n)


def _check_feasible(n, k):
    if k < 1:
        raise DegenerateFitError(f"segment count must be >= 1, got {k}")
    if n < 2 * k:
        raise DegenerateFitError(f"{k} segments need at least {2 * k} samples, got {n}")


def _backtrack(back, k, n):
    bps = [n - 1]
    j = n - 1
    for kk in range(k, 1, -1):
        j = int(back[kk, j])
        bps.append(j)
    bps.append(0)
    return tuple(reversed(bps))


def _build(series, bps, evaluated=None):
    t, q = series.t, series.q
    fits = [line_fit(t[a : b + 1], q[a : b + 1]) for a, b in zip(bps[:-1], bps[1:])]
    slopes, icpts, sse = (np.array(col) for col in zip(*fits))
    k = len(bps) - 1
    return Segmentation(
        bps, slopes, icpts, sse, bic_cost(float(sse.sum()), t.size, k), dict(evaluated or {})
    )


class _Solver:
    """Caches the segment cost matrix so several counts share one pass."""

    def __init__(self, series, backend=None):
        self.series = series
        self.n = len(series)
        self.backend = backend
        self.cost = _kernels.cost_matrix(series.t, series.q, backend)
        self._table = None
        self._back = None

    def _ensure(self, k):
        if self._table is None or self._table.shape[0] <= k:
            self._table, self._back = _kernels.dp(self.cost, k, self.backend)

    def sse(self, k):
        self._ensure(k)
        return float(self._table[k, self.n - 1])

    def objective(self, k):
        return bic_cost(self.sse(k), self.n, k)

    def segmentation(self, k, evaluated=None):
        self._ensure(k)
        return _build(self.series, _backtrack(self._back, k, self.n), evaluated)


def fit_fixed_k(series: TimeSeries, k: int, backend=None) -> Segmentation:
    """Least-squares optimal placement of exactly ``k`` segments."""
    _check_feasible(len(series), k)
    return _Solver(series, backend).segmentation(k)


# -- count search strategies ---------------------------------------------------
# A strategy receives (objective, candidates, budget, rng) and returns a dict
# {k: cost} of the evaluated counts.

SearchStrategy = Callable[[Callable[[int], float], list, int, np.random.Generator], dict]


def exhaustive_search(objective, candidates, budget, rng):
    return {k: objective(k) for k in candidates}


def _gp_posterior(xs, ys, grid, length=0.25, noise=1e-6):
    def rbf(a, b):
        return np.exp(-0.5 * ((a[:, None] - b[None, :]) / length) ** 2)

    mu0, sd0 = ys.mean(), ys.std() or 1.0
    yn = (ys - mu0) / sd0
    K = rbf(xs, xs) + noise * np.eye(xs.size)
    L = np.linalg.cholesky(K)
    alpha = np.linalg.solve(L.T, np.linalg.solve(L, yn))
    Ks = rbf(xs, grid)
    mean = Ks.T @ alpha
    v = np.linalg.solve(L, Ks)
    var = np.clip(1.0 - np.sum(v * v, axis=0), 1e-12, None)
    return mean * sd0 + mu0, np.sqrt(var) * sd0


def _expected_improvement(mean, sd, best):
    # minimization
    z = (best - mean) / sd
    cdf = 0.5 * (1.0 + np.vectorize(math.erf)(z / math.sqrt(2.0)))
    pdf = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return (best - mean) * cdf + sd * pdf


def bayesian_search(objective, candidates, budget, rng):
    """Gaussian-process surrogate with expected-improvement acquisition."""
    candidates = sorted(candidates)
    if budget >= len(candidates):
        return exhaustive_search(objective, candidates, budget, rng)
    span = max(candidates[-1] - candidates[0], 1)

    def scale(ks):
        return (np.asarray(ks, dtype=float) - candidates[0]) / span

    n_init = min(budget, max(2, budget // 3))
    init = sorted(rng.choice(candidates, size=n_init, replace=False).tolist())
    evaluated = {k: objective(k) for k in init}
    while len(evaluated) < budget:
        remaining = [k for k in candidates if k not in evaluated]
        xs = scale(list(evaluated))
        ys = np.array(list(evaluated.values()))
        mean, sd = _gp_posterior(xs, ys, scale(remaining))
        ei = _expected_improvement(mean, sd, ys.min())
        k = remaining[int(np.argmax(ei))]
        evaluated[k] = objective(k)
    return evaluated


def select_k(
    series: TimeSeries,
    k_max: int = DEFAULT_K_MAX,
    budget: int | None = None,
    seed: int = 0,
    strategy: SearchStrategy = bayesian_search,
    backend=None,
) -> Segmentation:
    """Choose the segment count minimizing
    ``n * ln(SSE(k)/n + 1e-12) + 3 k ln n`` over ``1..k_max``.

    Counts with too few samples are skipped. With ``budget >= k_max`` (the
    default), every feasible count is evaluated and the result is the exact
    minimizer. Cost ties go to the smaller count.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    budget = k_max if budget is None else budget
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    n = len(series)
    candidates = [k for k in range(1, k_max + 1) if n >= 2 * k]
    if not candidates:
        raise DegenerateFitError(f"no feasible segment count for {n} samples")
    solver = _Solver(series, backend)
    evaluated = strategy(solver.objective, candidates, budget, np.random.default_rng(seed))
    best = min(evaluated, key=lambda k: (evaluated[k], k))
    return solver.segmentation(best, evaluated)

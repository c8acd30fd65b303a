"""Synthetic quality curves for demos and tests."""
from __future__ import annotations

import numpy as np

__all__ = ["generate_fixture", "SHAPES"]

SHAPES = ("v", "trapezoid", "multi-dip", "noisy")


def _v(depth=0.5, length=2.0, rng=None):
    if not 0 < depth <= 1 or length <= 0:
        raise ValueError("v needs 0 < depth <= 1 and length > 0")
    return [0.0, length / 2, float(length)], [1.0, 1.0 - depth, 1.0]


def _trapezoid(depth=0.5, n_steady=10, n_down=5, n_up=5, spacing=1.0, base=1.0, rng=None):
    """steady -> linear drop -> linear rise -> steady, breakpoints on samples."""
    if not 0 < depth <= base <= 1:
        raise ValueError("trapezoid needs 0 < depth <= base <= 1")
    if min(n_steady, n_down, n_up) < 2:
        raise ValueError("trapezoid pieces need at least 2 intervals each")
    q = np.concatenate((
        np.full(n_steady, base),
        base - depth * np.arange(n_down) / n_down,
        base - depth + depth * np.arange(n_up) / n_up,
        np.full(n_steady + 1, base),
    ))
    t = spacing * np.arange(q.size)
    return t.tolist(), q.tolist()


def _multi_dip(n_dips=3, depth=0.5, width=4, base=1.0, rng=None):
    if n_dips < 1 or width < 2 or not 0 < depth <= base <= 1:
        raise ValueError("multi-dip needs n_dips >= 1, width >= 2, 0 < depth <= base <= 1")
    half = width // 2
    one = np.concatenate((
        base - depth * np.arange(half + 1)[1:] / half,
        base - depth + depth * np.arange(width - half + 1)[1:] / (width - half),
    ))
    q = np.concatenate(([base], np.tile(one, n_dips)))
    t = np.arange(q.size, dtype=float)
    return t.tolist(), np.clip(q, 0.0, 1.0).tolist()


def _noisy(n=136, sigma=0.02, depth=0.4, rng=None):
    if n < 8 or sigma < 0:
        raise ValueError("noisy needs n >= 8 and sigma >= 0")
    t = np.arange(n, dtype=float)
    a, b, c = int(0.3 * n), int(0.45 * n), int(0.65 * n)
    clean = np.interp(t, [0, a, b, c, n - 1], [0.95, 0.95, 0.95 - depth, 0.95, 0.95])
    q = np.clip(clean + rng.normal(0.0, sigma, n), 0.0, 1.0)
    return t.tolist(), q.tolist()


def generate_fixture(shape: str, params: dict | None = None, seed: int = 0, name=None) -> dict:
    """Native-schema document holding one synthetic series."""
    params = dict(params or {})
    rng = np.random.default_rng(seed)
    builders = {"v": _v, "trapezoid": _trapezoid, "multi-dip": _multi_dip, "noisy": _noisy}
    if shape not in builders:
        raise ValueError(f"unknown shape {shape!r}; choose from {SHAPES}")
    t, q = builders[shape](rng=rng, **params)  # unknown keys raise TypeError
    return {"series": [{"name": name or shape, "t": t, "q": q}]}

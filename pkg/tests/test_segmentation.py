import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resil import _kernels
from resil.errors import DegenerateFitError
from resil.fixtures import generate_fixture
from resil.segmentation import bayesian_search, exhaustive_search, fit_fixed_k, select_k
from resil.series import TimeSeries

from oracles import bic, brute_force_segmentation


def v_shape(vertex=5, n=11):
    t = np.arange(n, dtype=float)
    q = 1.0 - 0.08 * np.abs(t - vertex)
    return TimeSeries("v", t, q)


def trapezoid():
    doc = generate_fixture("trapezoid")["series"][0]
    return TimeSeries("trap", doc["t"], doc["q"])


def test_line_k1():
    t = np.linspace(0, 4, 9)
    seg = fit_fixed_k(TimeSeries("l", t, t / 4), 1)
    assert seg.breakpoints == (0, 8)
    assert seg.total_sse <= 1e-12
    assert seg.slopes[0] == pytest.approx(0.25)


def test_v_shape_breakpoint():
    seg = fit_fixed_k(v_shape(), 2)
    assert seg.breakpoints == (0, 5, 10)
    assert seg.total_sse <= 1e-12


def test_degenerate():
    with pytest.raises(DegenerateFitError):
        fit_fixed_k(TimeSeries("s", [0, 1, 2], [1, 0.5, 1]), 2)


def test_select_k_examples():
    v = v_shape()
    assert select_k(v, k_max=6, budget=6).k == 2
    const = TimeSeries("c", np.arange(12.0), np.full(12, 0.7))
    assert select_k(const, k_max=6, budget=6).k == 1
    assert select_k(v, k_max=1) == fit_fixed_k(v, 1)


def test_trapezoid_four_segments():
    seg = select_k(trapezoid())
    assert seg.k == 4
    assert seg.breakpoints == (0, 10, 15, 20, 30)


def test_infeasible_counts_skipped():
    s = TimeSeries("s", np.arange(5.0), [1, 0.5, 0.2, 0.5, 1])
    seg = select_k(s, k_max=6)
    assert set(seg.evaluated) == {1, 2}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(5, 12))
def test_matches_brute_force(seed, n):
    rng = np.random.default_rng(seed)
    t = np.cumsum(rng.uniform(0.1, 1.0, n))
    q = rng.uniform(0, 1, n)
    s = TimeSeries("r", t, q)
    prev = np.inf
    for k in range(1, min(3, n // 2) + 1):
        seg = fit_fixed_k(s, k)
        ref, _ = brute_force_segmentation(t, q, k)
        assert seg.total_sse == pytest.approx(ref, abs=1e-9)
        assert seg.total_sse <= prev + 1e-9
        prev = seg.total_sse


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_sse_non_increasing_up_to_5(seed):
    rng = np.random.default_rng(seed)
    n = 12
    t = np.arange(n, dtype=float)
    q = rng.uniform(0, 1, n)
    sses = [fit_fixed_k(TimeSeries("r", t, q), k).total_sse for k in range(1, 6)]
    refs = [brute_force_segmentation(t, q, k)[0] for k in range(1, 6)]
    np.testing.assert_allclose(sses, refs, atol=1e-9)
    assert all(b <= a + 1e-9 for a, b in zip(sses, sses[1:]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_exhaustive_select_is_global_minimizer(seed):
    rng = np.random.default_rng(seed)
    n = 10
    t = np.arange(n, dtype=float)
    q = np.clip(np.repeat(rng.uniform(0, 1, 3), [4, 3, 3]) + rng.normal(0, 0.02, n), 0, 1)
    seg = select_k(TimeSeries("r", t, q), k_max=4, budget=4)
    costs = {k: bic(brute_force_segmentation(t, q, k)[0], n, k) for k in range(1, 5)}
    best = min(costs, key=lambda k: (round(costs[k], 9), k))
    assert seg.k == best


def test_deterministic_with_seed():
    doc = generate_fixture("noisy", seed=3)["series"][0]
    s = TimeSeries("n", doc["t"], doc["q"])
    a = select_k(s, k_max=12, budget=5, seed=7)
    b = select_k(s, k_max=12, budget=5, seed=7)
    assert a == b and a.evaluated == b.evaluated
    assert len(a.evaluated) == 5


def test_bayesian_search_respects_budget_and_finds_minimum():
    calls = []

    def objective(k):
        calls.append(k)
        return (k - 7) ** 2

    out = bayesian_search(objective, list(range(1, 21)), 8, np.random.default_rng(0))
    assert len(out) == 8 == len(set(calls))
    assert min(out, key=out.get) == 7


def test_search_strategy_is_pluggable():
    s = v_shape()
    seg = select_k(s, k_max=4, budget=1, strategy=exhaustive_search)
    assert set(seg.evaluated) == {1, 2, 3, 4} and seg.k == 2


def test_fitted_values_reproduce_exact_pieces():
    s = trapezoid()
    seg = select_k(s)
    np.testing.assert_allclose(seg.fitted(s.t), s.q, atol=1e-9)


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")
@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 60))
def test_backends_agree_bitwise(seed, n):
    rng = np.random.default_rng(seed)
    t = np.cumsum(rng.uniform(0.01, 2.0, n))
    q = rng.uniform(0, 1, n)
    c_np = _kernels.cost_matrix(t, q, "numpy")
    c_nb = _kernels.cost_matrix(t, q, "numba")
    np.testing.assert_array_equal(c_np, c_nb)
    k = max(1, n // 3)
    tab_np, back_np = _kernels.dp(c_np, k, "numpy")
    tab_nb, back_nb = _kernels.dp(c_nb, k, "numba")
    np.testing.assert_array_equal(tab_np, tab_nb)
    # back-pointers are only meaningful where the cost is finite
    fin = np.isfinite(tab_np)
    np.testing.assert_array_equal(back_np[fin], back_nb[fin])

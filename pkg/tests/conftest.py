import numpy as np
import pytest
from hypothesis import strategies as st

from resil.series import TimeSeries


@pytest.fixture
def v_series():
    return TimeSeries("V", [0.0, 1.0, 2.0], [1.0, 0.5, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def series_st(draw, min_n=2, max_n=30):
    n = draw(st.integers(min_n, max_n))
    gaps = draw(st.lists(st.floats(0.01, 5.0), min_size=n - 1, max_size=n - 1))
    t0 = draw(st.floats(-100, 100))
    q = draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n))
    t = t0 + np.concatenate(([0.0], np.cumsum(gaps)))
    if np.any(np.diff(t) <= 0):  # float absorption at large offsets
        t = np.arange(n, dtype=float)
    return TimeSeries("s", t, q)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""
    def record(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

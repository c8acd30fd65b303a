import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resil.antifragility import RANK, AntifragilityScore, alpha, classify, mean_alpha
from resil.dipmetrics import NotComputable


@pytest.mark.parametrize("values, expected, cls", [
    ([0.5, 0.4, 0.3], 0.0, "fragile"),
    ([0.5, 0.6, 0.72], 1.2, "antifragile"),
    ([0.5, 0.6, 0.4], 0.5, "mixed"),
])
def test_examples(values, expected, cls):
    a = alpha(values, "r")
    assert a.alpha == pytest.approx(expected, abs=1e-12)
    assert a.classification == cls and a.n_dips == 3


def test_single_dip_not_computable():
    a = alpha([0.7], "r")
    assert a.alpha is None and not a.computable
    assert a.classification == "not-computable" and "2 dips" in a.reason
    assert "reason" in a.to_dict()


def test_flat_sequence_is_antifragile_floor():
    assert alpha([0.4, 0.4, 0.4]).alpha == 1.0


def test_not_computable_value_propagates():
    a = alpha([0.5, NotComputable("rapi undefined"), 0.6])
    assert a.alpha is None and "dip 1" in a.reason


def test_improvement_from_zero():
    assert alpha([0.0, 0.0, 0.3]).alpha is None
    assert alpha([0.0, 0.0]).alpha == 1.0


@pytest.mark.parametrize("bad", [[-0.1, 0.2], [0.2, float("nan")]])
def test_invalid_values(bad):
    with pytest.raises(ValueError):
        alpha(bad)


def test_mean_alpha():
    scores = [AntifragilityScore(k, a, 3, classify(a)) for k, a in
              (("r", 0.0), ("rr", 0.5), ("ac", 1.3))]
    m = mean_alpha(scores)
    assert m.alpha == pytest.approx(0.6, abs=1e-12) and m.classification == "mixed"
    nc = AntifragilityScore("rr", None, 1, "not-computable", "x")
    m = mean_alpha([AntifragilityScore("r", 0.4, 2, "mixed"), nc])
    assert m.alpha == 0.4 and "rr" in m.reason
    m = mean_alpha([nc])
    assert m.alpha is None and m.reason


values_st = st.lists(st.floats(0.01, 1.0), min_size=2, max_size=15)


@given(values_st)
def test_branch_totality(u):
    a = alpha(u)
    d = np.diff(u)
    assert a.computable
    if np.all(d < 0):
        assert a.alpha == 0 and a.classification == "fragile"
    elif np.all(d >= 0):
        assert a.alpha >= 1 and a.classification == "antifragile"
    else:
        assert 0 < a.alpha < 1 and a.classification == "mixed"


@given(values_st, st.floats(0.1, 0.99))
def test_scale_invariance(u, c):
    assert alpha(np.multiply(u, c).tolist()).alpha == pytest.approx(alpha(u).alpha, rel=1e-9)


@given(values_st, st.integers(1, 5))
def test_decreasing_tail_never_raises_rank(u, n_tail):
    tail = [u[-1] * 0.9 ** (i + 1) for i in range(n_tail)]
    assert RANK[alpha(u + tail).classification] <= RANK[alpha(u).classification]


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=15, unique=True))
def test_reversed_increasing_is_fragile(u):
    assert alpha(sorted(u, reverse=True)).alpha == 0.0

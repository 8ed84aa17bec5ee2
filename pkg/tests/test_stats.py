from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from urbanlore.errors import DegenerateSample, EmptyGroup, LengthMismatch, ZeroVariance
from urbanlore.stats import approx_randomization, betainc, describe, f_test, macro_f1_metric, render_table, t_test
from urbanlore.stats.special import f_sf, t_sf_two_sided

# reference values computed once with scipy.special / scipy.stats and frozen
@pytest.mark.parametrize(
    "a, b, x, expected",
    [
        (2, 3, 0.4, 0.5247999999999999),
        (0.5, 0.5, 0.3, 0.36901011956554536),
        (10, 20, 0.33, 0.5019142489967602),
        (50, 60, 0.45, 0.46423529143060444),
        (3, 4, 0.0, 0.0),
        (3, 4, 1.0, 1.0),
    ],
)
def test_betainc_reference(a, b, x, expected):
    assert betainc(a, b, x) == pytest.approx(expected, rel=1e-10, abs=1e-14)


def test_betainc_tiny_x():
    x = 1.3442250688486715e-45
    assert betainc(0.125, 1.0, x) == pytest.approx(x ** 0.125, rel=1e-12)


def test_distribution_tails_reference():
    assert t_sf_two_sided(3.5, 12) == pytest.approx(0.0043818694317481486, rel=1e-9)
    assert f_sf(2.7, 3, 17) == pytest.approx(0.07827532662376947, rel=1e-9)


# x stays away from 0 and 1 so that 1 - x is not rounded to an endpoint
@given(st.floats(0.1, 50), st.floats(0.1, 50), st.floats(1e-3, 1 - 1e-3))
def test_betainc_symmetry(a, b, x):
    assert betainc(a, b, x) + betainc(b, a, 1 - x) == pytest.approx(1.0, abs=1e-9)


def test_t_test_reference():
    r = t_test([1, 2, 3, 4, 5], [3, 4, 5, 6, 7])
    assert r.t == -2.0 and r.df == 8
    assert r.p == pytest.approx(0.0805162379572626, rel=1e-9)


def test_welch_reference():
    r = t_test([1, 2, 3, 4, 5], [3, 4, 5, 6, 9], equal_var=False)
    assert r.t == pytest.approx(-1.921537845661046, rel=1e-12)
    assert r.df == pytest.approx(7.08677926616191, rel=1e-12)
    assert r.p == pytest.approx(0.0956017347733, rel=1e-9)


def test_t_test_degenerate_cases():
    r = t_test([2, 2, 2], [2, 2, 2])
    assert (r.t, r.p) == (0.0, 1.0)
    assert t_test([1, 2, 3], [1, 2, 3]).p == pytest.approx(1.0)
    r = t_test([1, 1], [3, 3])
    assert r.t == -np.inf and r.p == 0.0
    with pytest.raises(DegenerateSample):
        t_test([1.0], [1.0, 2.0])


samples = st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=15)


@given(samples, samples)
def test_t_test_symmetry(a, b):
    ab, ba = t_test(a, b), t_test(b, a)
    assert ab.t == pytest.approx(-ba.t, nan_ok=True)
    assert ab.p == pytest.approx(ba.p)
    assert 0.0 <= ab.p <= 1.0


def test_f_test_examples():
    r = f_test([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    assert r.f == 4.0 and r.df == (4, 4)
    assert r.p == pytest.approx(0.20800000000000005, rel=1e-9)
    r = f_test([1, 2, 3], [1, 2, 3])
    assert (r.f, r.p) == (1.0, 1.0)
    with pytest.raises(ZeroVariance):
        f_test([1, 1, 1], [1, 2, 3])


@given(samples, samples)
def test_f_at_least_one(a, b):
    if np.var(a) == 0 or np.var(b) == 0:
        return
    r = f_test(a, b)
    assert r.f >= 1.0 and 0.0 <= r.p <= 1.0
    assert f_test(b, a).f == r.f


def test_randomization_identical_lists():
    assert approx_randomization([1, 0, 1], [1, 0, 1], rounds=200) == 1.0


def exhaustive(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    obs = abs(a.mean() - b.mean())
    hits = 0
    for swap in itertools.product([False, True], repeat=len(a)):
        s = np.array(swap)
        sa, sb = np.where(s, b, a), np.where(s, a, b)
        hits += abs(sa.mean() - sb.mean()) >= obs - 1e-12
    return hits / 2 ** len(a)


@pytest.mark.parametrize("a, b", [([1, 0, 1, 1], [0, 0, 1, 0]), ([0.9, 0.2, 0.7, 0.4], [0.1, 0.3, 0.2, 0.5])])
def test_randomization_matches_exhaustive(a, b):
    exact = exhaustive(a, b)
    assert approx_randomization(a, b, rounds=100_000, seed=1) == pytest.approx(exact, abs=0.01)
    metric = lambda v: float(np.mean(v))  # noqa: E731
    assert approx_randomization(a, b, metric, rounds=20_000, seed=2) == pytest.approx(exact, abs=0.015)


def test_randomization_deterministic_and_bounded():
    rng = np.random.default_rng(0)
    a, b = rng.random(30), rng.random(30)
    p = approx_randomization(a, b, rounds=500, seed=4)
    assert p == approx_randomization(a, b, rounds=500, seed=4)
    assert 1 / 501 <= p <= 1.0
    with pytest.raises(LengthMismatch):
        approx_randomization([1, 2], [1, 2, 3])


@given(st.floats(0, 5), st.floats(0, 5))
def test_randomization_monotone_in_observed_delta(k1, k2):
    lo, hi = sorted((k1, k2))
    base = [1.0, 1.0, 1.0]
    p_lo = approx_randomization(base + [lo], [0.0] * 4, rounds=300, seed=7)
    p_hi = approx_randomization(base + [hi], [0.0] * 4, rounds=300, seed=7)
    assert p_hi <= p_lo


def test_macro_f1_metric():
    metric = macro_f1_metric(["a", "b"])
    pairs = np.array([[0, 0], [0, 1], [1, 1], [1, 1]])
    # class a: P 1, R 0.5 -> 2/3 ; class b: P 2/3, R 1 -> 0.8
    assert metric(pairs) == pytest.approx((2 / 3 + 0.8) / 2)


def test_describe_and_render():
    m = np.array([[0.01, 5.0], [0.03, 5.0], [0.02, 7.0], [0.04, 9.0]])
    s = describe(m, ["FT", "FT", "GN", "GN"], ["LOC", "Fog"])
    assert s.get("FT", "Fog") == (5.0, 0.0)
    assert s.get("GN", "LOC") == pytest.approx((0.03, 0.01))
    assert s.n == (2, 2)
    text = render_table(s)
    assert "2.00%" in text and "LOC mu" in text and "Average" in text
    assert text.splitlines()[2].startswith("FT")
    assert "FT,Fog,5.0,0.0,2" in s.to_csv()


def test_describe_empty_group():
    with pytest.raises(EmptyGroup):
        describe(np.ones((2, 1)), ["FT", "FT"], ["x"], label_order=["FT", "UL"])

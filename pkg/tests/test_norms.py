from itertools import combinations
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fieldlln.norms import (
    NormSpec, bootstrap_stderr, lp_norm, lpq_moment, luxemburg_norm, norm_of, phi,
    weak_comparison_constants, weak_lp_norm, weak_tail_quasinorm,
)

samples = st.lists(st.floats(0, 1e4, allow_nan=False), min_size=1, max_size=40)


def test_phi_examples():
    assert phi(2, 0, 3.0) == 9.0
    assert phi(1.5, 2, 0.0) == 0.0
    assert phi(2, 1, math.e) == pytest.approx(2 * math.e**2)
    assert phi(2, 1, 2 * math.e**2 / 2 / math.e) == pytest.approx(2 * math.e**2)


def test_phi_monotone_continuous():
    t = np.linspace(0, 5, 2001)
    v = phi(1.5, 2, t)
    assert np.all(np.diff(v) >= 0)
    assert phi(1.5, 2, 1 - 1e-12) == pytest.approx(phi(1.5, 2, 1.0), rel=1e-9)


def test_lp_examples():
    assert lp_norm([3.0, 3.0], 1.7) == pytest.approx(3.0)
    assert lp_norm([0.0, 2.0], 2) == pytest.approx(math.sqrt(2))
    assert lp_norm([1.0, 2.0, 6.0], 1) == pytest.approx(3.0)
    assert lp_norm([0.0, 0.0], 3) == 0.0


def test_luxemburg_examples():
    assert luxemburg_norm([2.5] * 4, 1.5, 0) == pytest.approx(2.5)
    assert luxemburg_norm([0.0, 2.0], 1, 0) == pytest.approx(1.0)
    assert luxemburg_norm([0.0, 0.0], 1.5, 1) == 0.0


def test_luxemburg_constant_with_log():
    # phi(c / lam) = 1 forces c / lam = 1
    assert luxemburg_norm([7.0] * 5, 1.5, 2) == pytest.approx(7.0, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(samples, st.floats(1.01, 3), st.floats(0, 3))
def test_luxemburg_root(v, p, q):
    lam = luxemburg_norm(v, p, q)
    if lam > 0:
        assert np.mean(phi(p, q, np.asarray(v) / lam)) == pytest.approx(1.0, abs=1e-6)
    else:
        assert max(v) == 0


@settings(max_examples=60, deadline=None)
@given(samples, st.floats(1.01, 3), st.floats(0, 2), st.floats(1e-3, 1e3))
def test_luxemburg_homogeneous(v, p, q, c):
    a = luxemburg_norm(np.asarray(v) * c, p, q)
    b = c * luxemburg_norm(v, p, q)
    assert a == pytest.approx(b, rel=1e-8, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(samples, st.floats(1.01, 3), st.floats(0, 2), st.data())
def test_luxemburg_monotone(v, p, q, data):
    extra = data.draw(st.lists(st.floats(0, 10), min_size=len(v), max_size=len(v)))
    w = np.asarray(v) + np.asarray(extra)
    assert luxemburg_norm(w, p, q) >= luxemburg_norm(v, p, q) * (1 - 1e-10)


@settings(max_examples=60, deadline=None)
@given(samples, st.floats(1.0, 4))
def test_orlicz_q0_is_lp(v, p):
    assert luxemburg_norm(v, p, 0) == pytest.approx(lp_norm(v, p), rel=1e-9, abs=1e-300)


def brute_weak(v, p):
    n = len(v)
    best = 0.0
    for k in range(1, n + 1):
        for A in combinations(range(n), k):
            best = max(best, (k / n) ** (-1 + 1 / p) * sum(v[i] for i in A) / n)
    return best


def test_weak_examples():
    assert weak_lp_norm([1.0, 1.0, 1.0, 3.0], 2) == pytest.approx(1.5)
    assert weak_lp_norm([2.0] * 5, 1.5) == pytest.approx(2.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=1, max_size=10), st.floats(1.05, 3))
def test_weak_topk_is_exhaustive(v, p):
    assert weak_lp_norm(v, p) == pytest.approx(brute_weak(v, p), rel=1e-12, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(samples, st.floats(1.05, 3))
def test_weak_below_lp_and_tail_comparison(v, p):
    w = weak_lp_norm(v, p)
    assert w <= lp_norm(v, p) * (1 + 1e-12)
    c, C = weak_comparison_constants(p)
    t = weak_tail_quasinorm(v, p)
    assert c * t <= w * (1 + 1e-12)
    assert w <= C * t * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=2, max_size=20), st.floats(1.05, 3))
def test_weak_subadditive(v, p):
    v = np.asarray(v)
    w = v[::-1].copy()
    assert weak_lp_norm(v + w, p) <= (weak_lp_norm(v, p) + weak_lp_norm(w, p)) * (1 + 1e-12)


def test_lpq_moment():
    assert lpq_moment([1.0], 2, 1) == pytest.approx(math.log(2))
    assert lpq_moment([0.0, 0.0], 1.5, 2) == 0.0
    assert lpq_moment([2.0, 3.0], 2, 0) == pytest.approx(6.5)


def test_norm_spec_dispatch_and_json():
    v = [0.5, 1.0, 4.0]
    assert norm_of(v, NormSpec.lp(2)) == lp_norm(v, 2)
    assert norm_of(v, NormSpec.orlicz(1.5, 1)) == luxemburg_norm(v, 1.5, 1)
    assert norm_of(v, NormSpec.weak(2)) == weak_lp_norm(v, 2)
    s = NormSpec.orlicz(1.5, 1)
    assert NormSpec.from_json(s.to_json()) == s


def test_bad_samples_rejected():
    with pytest.raises(ValueError):
        lp_norm([], 2)
    with pytest.raises(ValueError):
        lp_norm([-1.0], 2)
    with pytest.raises(ValueError):
        weak_lp_norm([np.inf], 2)


def test_bootstrap_stderr_scale(rng):
    v = rng.exponential(size=4000)
    se = bootstrap_stderr(v, np.mean, 300, 1)
    assert se == pytest.approx(1 / math.sqrt(4000), rel=0.2)
    assert bootstrap_stderr([3.0] * 10, np.mean) == 0.0

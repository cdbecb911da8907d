import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fieldlln.space import EUCLIDEAN, VecNorm, operator_norm


def test_norm_kinds():
    x = np.array([3.0, -4.0])
    assert EUCLIDEAN(x) == pytest.approx(5.0)
    assert VecNorm(1)(x) == pytest.approx(7.0)
    assert VecNorm(np.inf)(x) == pytest.approx(4.0)
    assert VecNorm(3)(x) == pytest.approx((27 + 64) ** (1 / 3))
    assert EUCLIDEAN(np.array([-2.5])) == 2.5


def test_smoothness():
    assert EUCLIDEAN.smoothness == 2.0
    assert VecNorm(1.5).smoothness == 1.5
    assert VecNorm(4).smoothness == 2.0
    with pytest.raises(ValueError):
        VecNorm(0.5)


def test_json_round_trip():
    for n in (EUCLIDEAN, VecNorm(1.5)):
        assert VecNorm.from_json(n.to_json()) == n


@settings(max_examples=50, deadline=None)
@given(arrays(float, 3, elements=st.floats(-1e3, 1e3)), st.floats(-5, 5),
       st.sampled_from([None, 1.0, 1.5, 3.0]))
def test_norm_homogeneous(x, c, s):
    n = VecNorm(s)
    assert n(c * x) == pytest.approx(abs(c) * n(x), rel=1e-9, abs=1e-9)


def test_operator_norm_euclidean_matches_svd(rng):
    A = rng.normal(size=(4, 4))
    assert operator_norm(A) == pytest.approx(np.linalg.norm(A, 2), rel=1e-7)


def test_operator_norm_closed_forms(rng):
    A = rng.normal(size=(3, 3))
    assert operator_norm(A, VecNorm(1)) == pytest.approx(np.abs(A).sum(axis=0).max())
    assert operator_norm(A, VecNorm(np.inf)) == pytest.approx(np.abs(A).sum(axis=1).max())
    D = np.diag([0.5, -2.0, 1.0])
    assert operator_norm(D, VecNorm(1.5)) == pytest.approx(2.0, rel=1e-7)
    assert operator_norm(np.zeros((2, 2))) == 0.0
    assert operator_norm(0.25 * np.eye(2)) == pytest.approx(0.25)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concave_field.softmin import (
    EmptyInput,
    softmin,
    softmin_bounds_check,
    softmin_shift_check,
    softmin_weights,
)

values = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=30)
lams = st.floats(1e-3, 1e3)


def test_two_values_closed_form():
    # -log((1 + e^-2) / 2) = log 2 - log(1 + e^-2)
    assert softmin([0.0, 2.0], 1.0) == pytest.approx(0.5662191695169727, abs=1e-15)
    assert math.log(2) - math.log1p(math.exp(-2)) == pytest.approx(0.566219, abs=1e-6)


def test_single_value_and_hardmin():
    assert softmin([3.5], 7.0) == 3.5
    assert softmin([4.0, 1.0, 2.0], math.inf) == 1.0


def test_no_overflow_for_large_lambda():
    v = np.array([0.0, 1.0, 500.0])
    s = softmin(v, 1e6)
    assert np.isfinite(s)
    assert s == pytest.approx(math.log(3) / 1e6, rel=1e-9)


def test_empty_and_bad_lambda():
    with pytest.raises(EmptyInput):
        softmin([], 1.0)
    with pytest.raises(ValueError):
        softmin([1.0], 0.0)
    with pytest.raises(ValueError):
        softmin([1.0], -2.0)


@settings(max_examples=300, deadline=None)
@given(values, lams)
def test_sandwich(v, lam):
    assert softmin_bounds_check(v, lam, tol=1e-9 * max(1.0, max(abs(x) for x in v)))


@settings(max_examples=300, deadline=None)
@given(values, lams, st.floats(-100, 100))
def test_shift_equivariance(v, lam, c):
    assert softmin_shift_check(v, lam, c, tol=1e-9 * max(1.0, max(abs(x) for x in v)))


@settings(max_examples=200, deadline=None)
@given(values, lams)
def test_weights_are_gradient(v, lam):
    v = np.array(v)
    w = softmin_weights(v, lam)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(w >= 0)


def test_weights_match_finite_differences():
    v = np.array([0.3, 0.1, 0.7, 0.2])
    w = softmin_weights(v, 3.0)
    h = 1e-6
    fd = [(softmin(v + h * e, 3.0) - softmin(v - h * e, 3.0)) / (2 * h) for e in np.eye(4)]
    assert np.allclose(w, fd, atol=1e-9)


def test_hardmin_weights_first_minimiser():
    assert softmin_weights([2.0, 1.0, 1.0], math.inf).tolist() == [0.0, 1.0, 0.0]


def test_array_lambda_matches_scalar_calls():
    rng = np.random.default_rng(1)
    v = rng.normal(size=(5, 4))
    lam = np.array([0.1, 1.0, 3.0, 10.0, 100.0])
    batched = softmin(v, lam)
    assert np.allclose(batched, [softmin(row, l) for row, l in zip(v, lam)], rtol=0, atol=1e-14)
    with pytest.raises(ValueError):
        softmin(v, np.array([1.0, math.inf, 1.0, 1.0, 1.0]))


def test_monotone_in_lambda():
    v = np.array([0.2, 0.5, 0.9])
    vals = [softmin(v, lam) for lam in (0.1, 1.0, 10.0, 100.0)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))

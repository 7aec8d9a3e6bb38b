import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concave_field.quadrature import (
    dirichlet_integral,
    gauss_jacobi_01,
    graded_gauss_legendre,
    graded_simplex_rule,
    simplex_integrate,
)


def test_jacobi_weights_integrate_beta():
    x, w = gauss_jacobi_01(10, 0.5, 1.5)
    assert w.sum() == pytest.approx(math.gamma(1.5) * math.gamma(2.5) / math.gamma(4.0), rel=1e-13)


def test_simplex_volume():
    for d in (1, 2, 3):
        assert simplex_integrate(lambda y: np.ones(len(y)), d) == pytest.approx(1 / math.factorial(d), rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-0.9, 3.0), min_size=1, max_size=3), st.floats(-0.5, 2.0))
def test_product_weights_match_dirichlet(powers, slack):
    d = len(powers)
    got = simplex_integrate(lambda y: np.ones(len(y)), d, order=6, powers=powers, slack_power=slack)
    assert got == pytest.approx(dirichlet_integral(powers, slack), rel=1e-10)


def test_polynomial_moments():
    # integral of y1 * y2 over the 2-simplex is 1!1!/4! = 1/24
    assert simplex_integrate(lambda y: y[:, 0] * y[:, 1], 2) == pytest.approx(1 / 24, rel=1e-12)


def test_graded_rules():
    x, w = graded_gauss_legendre(20)
    assert np.sum(w * np.log(x)) == pytest.approx(-1.0, abs=1e-9)
    y, wy = graded_simplex_rule(2, 10, depth=4)
    assert wy.sum() == pytest.approx(0.5, rel=1e-12)
    assert np.sum(wy * y[:, 0]) == pytest.approx(1 / 6, rel=1e-12)

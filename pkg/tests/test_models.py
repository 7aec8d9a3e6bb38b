import math

import numpy as np
import pytest
from scipy import integrate

from concave_field.models import (
    ConstantIntensity,
    DomainError,
    IidExponential,
    IidUniform,
    IndependentGamma,
    NotSampleable,
    Unsupported,
    intensity_integral_mc,
    parse_model,
)
from concave_field.rng import replica_rng
from concave_field.stats import two_sample_ks

MODELS = [IidUniform(n=2, scale=2.0), IidExponential(n=3, rate=1.5), IndependentGamma((1.5, 2.5), (1.0, 3.0))]


def test_m_constant_closed_forms():
    assert IidUniform(n=3).M == pytest.approx(1 / 6, rel=1e-13)
    assert ConstantIntensity(n=2, gamma=3.0).M == pytest.approx(1.5, rel=1e-13)
    g = IndependentGamma((1.5, 1.5))
    # gamma * Gamma(1.5)^2 / Gamma(4) with gamma = 1 / Gamma(1.5)^2
    assert g.M == pytest.approx(1 / 6, rel=1e-13)
    assert g.alpha == 1.0 and g.index == 3.0
    assert g.constant_weights.tolist() == [0.5, 0.5]


def test_region_integral_values():
    assert IidUniform(n=2).intensity_integral_R([0.5, 0.5], 1.0) == pytest.approx(2.0)
    assert IidUniform(n=2).intensity_integral_R([0.5, 0.5], 0.0) == 0.0
    with pytest.raises(DomainError):
        IidUniform(n=2).intensity_integral_R([0.5, 0.5], -1.0)


@pytest.mark.parametrize("model", MODELS + [IndependentGamma((0.5, 1.0))])
def test_region_integral_against_monte_carlo(model):
    p = np.full(model.n, 1.0 / model.n) if model.n > 2 else np.array([0.3, 0.7])
    est, err = intensity_integral_mc(model.h, p, 0.8, replica_rng(1), 400_000)
    exact = model.intensity_integral_R(p, 0.8)
    assert abs(est - exact) < 4 * err + 1e-3 * exact


@pytest.mark.parametrize("model", MODELS)
def test_densities_integrate_to_one(model):
    if model.n == 2:
        hi = getattr(model, "scale", 60.0)
        total, _ = integrate.dblquad(lambda y, x: model.density(np.array([x, y])), 0, hi, 0, hi)
    else:
        total, _ = integrate.tplquad(lambda z, y, x: model.density(np.array([x, y, z])), 0, 30, 0, 30, 0, 30)
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("model", MODELS)
def test_small_scale_limit(model):
    x = replica_rng(3).uniform(0.1, 1.0, (20, model.n))
    errs = [model.small_scale_error(k, x) for k in (1e-2, 1e-4, 1e-6)]
    assert errs[-1] < 1e-5 * np.max(model.h(x))
    assert errs[0] >= errs[-1]


@pytest.mark.parametrize("model", MODELS)
def test_cgf_taylor_and_sampling(model):
    t = np.full(model.n, -1e-6)
    mean = model.sample(replica_rng(4), 200_000).mean(axis=0)
    assert model.cgf(t) == pytest.approx(float(t @ mean), rel=2e-2)
    t = np.linspace(-2.0, -0.5, model.n)
    x = model.sample(replica_rng(5), 400_000)
    assert model.cgf(t) == pytest.approx(math.log(np.mean(np.exp(x @ t))), abs=5e-3)
    with pytest.raises(DomainError):
        model.cgf(np.full(model.n, 0.1))


def test_constant_intensity_has_no_law():
    c = ConstantIntensity(n=2)
    with pytest.raises(NotSampleable):
        c.sample(replica_rng(0), 3)
    with pytest.raises(Unsupported):
        c.cgf([-1.0, -1.0])


def test_exponential_equals_unit_gamma():
    a = IidExponential(n=2).sample(replica_rng(10), 10 ** 4)
    b = IndependentGamma((1.0, 1.0)).sample(replica_rng(11), 10 ** 4)
    for i in range(2):
        assert two_sample_ks(a[:, i], b[:, i]).statistic < 0.02


def test_box_and_region_sampling():
    g = IndependentGamma((2.0, 1.0))
    rng = replica_rng(12)
    x = g.sample_box(rng, 100_000, [2.0, 3.0])
    assert x[:, 0].max() <= 2.0 and x[:, 1].max() <= 3.0
    # density proportional to x1 on [0, 2]: mean 4/3
    assert x[:, 0].mean() == pytest.approx(4 / 3, rel=1e-2)
    y = g.sample_region(rng, 100_000, [0.5, 0.5], 1.0)
    assert np.all(y @ [0.5, 0.5] < 1.0)
    assert g.box_mass([2.0, 3.0]) == pytest.approx(g.gamma * 2.0 * 3.0)


def test_parse_model():
    assert parse_model("exponential:rate=2.0", 3) == IidExponential(n=3, rate=2.0)
    assert parse_model("uniform:scale=1.0") == IidUniform(n=2, scale=1.0)
    assert parse_model("constant-h:gamma=2") == ConstantIntensity(n=2, gamma=2.0)
    g = parse_model("gamma:shapes=[1.5,2.0],scales=[2,4]")
    assert g.shapes == (1.5, 2.0) and g.rates == (0.5, 0.25)
    g = parse_model("gamma:shapes=[1.5,2.0],rates=[2,4]")
    assert g.rates == (2.0, 4.0)
    with pytest.raises(ValueError):
        parse_model("cauchy:scale=1")

import math

import numpy as np
import pytest

from concave_field import models, samplers, simplex
from concave_field.models import DomainError
from concave_field.rng import map_replicas, replica_rng
from concave_field.simplex import CompactSlice, EmptyEnsemble
from concave_field.stats import ks_test_exponential, two_sample_ks

UNI = models.IidUniform(n=2)
EXP = models.IidExponential(n=2)
H1 = models.ConstantIntensity(n=2)
E = simplex.barycenter(2)


def test_single_plane_softmin():
    f = samplers.sample_softmin_fixed_lambda(UNI, 1, 3.0, replica_rng(0))
    p = np.array([0.3, 0.7])
    assert f(p) == pytest.approx(p @ f.planes[0], abs=1e-15)


def test_deterministic_limit_value():
    assert samplers.eval_deterministic_limit(EXP, 10.0, E) == pytest.approx(0.2 * math.log(6), abs=1e-14)
    assert 0.2 * math.log(6) == pytest.approx(0.358352, abs=1e-6)
    with pytest.raises(models.Unsupported):
        samplers.eval_deterministic_limit(H1, 10.0, E)


def test_fixed_lambda_sample_near_limit():
    f = samplers.sample_softmin_fixed_lambda(EXP, 10 ** 5, 10.0, replica_rng(1))
    assert abs(f(E) - 0.2 * math.log(6)) < 0.01
    lo, hi = np.min(f.planes @ E), np.min(f.planes @ E) + math.log(10 ** 5) / 10.0
    assert lo <= f(E) <= hi


def test_small_lambda_limit_is_mean_plane():
    p = np.array([0.3, 0.7])
    assert samplers.eval_deterministic_limit(UNI, 1e-6, p) == pytest.approx(p @ [0.5, 0.5], rel=1e-6)


def test_large_lambda_normalised_limit():
    # ratio -> 1 only logarithmically: 1 + (log p1 + log p2 + 2 log 2) / (2 log(lam/2)) + ...
    grid = simplex.CompactSlice(2, 10, 8).points()
    devs = []
    for lam in (1e2, 1e4, 1e6, 1e12, 1e50):
        ratio = samplers.eval_deterministic_limit(EXP, lam, grid) / samplers.eval_deterministic_limit(EXP, lam, E)
        approx = 1 + (np.log(grid).sum(axis=1) + 2 * math.log(2)) / (2 * math.log(lam / 2))
        assert np.allclose(ratio, approx, atol=2.0 / lam ** 0.5 + 1e-12)
        devs.append(np.max(np.abs(ratio - 1)))
    assert all(a > b for a, b in zip(devs, devs[1:]))
    assert devs[-1] < 1e-2


def test_hardmin_single_plane_and_scale():
    f = samplers.sample_hardmin_scaled(UNI, 1, replica_rng(2))
    assert f.planes.shape == (1, 2)
    assert samplers.hardmin_scale(UNI, 10 ** 4) == pytest.approx(100.0)
    assert samplers.hardmin_scale(models.IndependentGamma((1.5, 1.5)), 1000) == pytest.approx(10.0)


def test_hardmin_values_match_sampled_function():
    g1, g2 = replica_rng(3), replica_rng(3)
    pts = np.array([[0.5, 0.5], [0.1, 0.9]])
    assert np.allclose(samplers.hardmin_values(UNI, 500, pts, g1), samplers.sample_hardmin_scaled(UNI, 500, g2)(pts))


def test_hardmin_one_point_law():
    vals = map_replicas(lambda g: samplers.hardmin_values(UNI, 10 ** 4, E, g), 10 ** 4, 21)
    assert ks_test_exponential(vals ** 2, 2.0).passed
    assert vals.mean() == pytest.approx(math.gamma(1.5) / math.sqrt(2), rel=0.02)


def test_poisson_point_count():
    M = 3.0
    counts = np.array([len(samplers.sample_poisson_points(H1, M, replica_rng(4, r))) for r in range(1000)])
    assert abs(counts.mean() - M ** 2) < 3 * M / math.sqrt(1000)


def test_poisson_envelope_certified_and_monotone():
    rng = replica_rng(5)
    sl = CompactSlice(2, 10, 20)
    env = samplers.sample_poisson_envelope(H1, sl, rng)
    assert np.all(env.points > 0) and np.all(env.points <= env.box)
    vals = env(sl.points())
    assert env.box * sl.floor >= vals.max()
    # adding the points of a larger box never raises the envelope
    extra = samplers.sample_poisson_points(H1, 2 * env.box, rng)
    extra = extra[np.any(extra > env.box, axis=1)]
    if len(extra):
        bigger = simplex.PolyhedralMin(np.vstack([env.points, extra]))
        assert np.all(bigger(sl.points()) <= vals)
        # and, being certified, does not change it on the slice
        assert np.allclose(bigger(sl.points()), vals)


def test_poisson_truncation_failure():
    with pytest.raises(samplers.TruncationFailure):
        samplers.sample_poisson_envelope(H1, CompactSlice(2, 1e6), replica_rng(6), max_box=4.0)


def test_poisson_one_point_law_and_agreement():
    pois = map_replicas(lambda g: samplers.sample_poisson_envelope(H1, E[None], g)(E), 10 ** 4, 22)
    assert ks_test_exponential(pois ** 2, 2.0).passed
    hard = map_replicas(lambda g: samplers.hardmin_values(UNI, 10 ** 4, E, g), 10 ** 4, 23)
    assert two_sample_ks(pois, hard).passed


def test_poisson_two_point_law():
    pts = np.array([[0.5, 0.5], [0.2, 0.8]])
    pois = map_replicas(lambda g: samplers.sample_poisson_envelope(H1, pts, g)(pts), 4000, 24)
    hard = map_replicas(lambda g: samplers.hardmin_values(UNI, 4000, pts, g), 4000, 25)
    # the ratio of the two values carries the joint dependence
    assert two_sample_ks(pois[:, 1] / pois[:, 0], hard[:, 1] / hard[:, 0]).passed


def test_boundary_decay_of_mean():
    pi = H1.constant_weights
    eps = np.array([0.1, 0.01, 0.001])
    means = []
    for e in eps:
        c = simplex.slice_center(0, e, 2)
        means.append(map_replicas(lambda g: samplers.sample_poisson_envelope(H1, c[None], g)(c), 3000, 26).mean())
    slope = np.polyfit(np.log(eps), np.log(means), 1)[0]
    assert means[0] > means[1] > means[2]
    assert 0.7 * pi[0] <= slope <= 1.3 * pi[0]


def test_diagonal_spec_and_identity():
    with pytest.raises(DomainError):
        samplers.DiagonalSpec(UNI, 2)
    with pytest.raises(ValueError):
        samplers.DiagonalSpec(UNI, 100, "linear", 0.0)
    K = 1000
    a = K ** 0.5
    assert samplers.DiagonalSpec(UNI, K, "superlog").lam == pytest.approx(a * math.log(K) ** 2)
    assert samplers.DiagonalSpec(UNI, K, "logshift", 2.0).lam == pytest.approx(2 * a * math.log(K))
    spec = samplers.DiagonalSpec(UNI, K, "linear", 0.7)
    assert spec.lam == pytest.approx(0.7 * a)
    f = samplers.sample_diagonal(spec, replica_rng(7))
    p = np.array([0.4, 0.6])
    v = 0.7 * (p @ (a * f.planes).T)
    direct = -(np.log(np.sum(np.exp(-(v - v.min())))) - v.min()) / 0.7
    assert f(p) == pytest.approx(direct, abs=1e-10)
    assert f.raw(p) - f(p) == pytest.approx(a * math.log(K) / spec.lam, abs=1e-12)


def test_linear_regime_goes_negative_near_boundary():
    spec = samplers.DiagonalSpec(UNI, 10 ** 4, "linear", 1.0)
    near = np.array([1e-3, 1 - 1e-3])
    vals = [samplers.sample_diagonal(spec, replica_rng(8, s))(near) for s in range(5)]
    assert min(vals) < 0


def test_psi_tilde():
    env = samplers.PoissonEnvelope(np.array([[0.4, 1.2]]), 2.0, None, None)
    p = np.array([0.3, 0.7])
    assert samplers.eval_psi_tilde(env, 2.5, p).value == pytest.approx(p @ [0.4, 1.2], abs=1e-15)
    with pytest.raises(EmptyEnsemble):
        samplers.eval_psi_tilde(np.empty((0, 2)), 1.0, p)
    rng = replica_rng(9)
    env = samplers.sample_poisson_envelope(H1, CompactSlice(2, 20), rng)
    pts = CompactSlice(2, 20, 10).points()
    tilde = np.array([samplers.eval_psi_tilde(env, 1.0, q).value for q in pts])
    assert np.all(tilde <= env(pts) + 1e-12)


def test_psi_tilde_expected_sum():
    def total(g):
        env = samplers.sample_poisson_envelope(H1, CompactSlice(2, 4), g)
        t = samplers.eval_psi_tilde(env, 1.0, E)
        return t.kept_mass + t.tail_mass

    sums = map_replicas(total, 1000, 27)
    assert sums.mean() == pytest.approx(4.0, rel=0.05)


def test_structural_invariants_of_samples():
    rng = replica_rng(10)
    fns = [
        samplers.sample_hardmin_scaled(UNI, 50, rng),
        samplers.sample_softmin_fixed_lambda(EXP, 50, 5.0, rng),
        samplers.sample_poisson_envelope(H1, CompactSlice(2, 10), rng),
        samplers.sample_diagonal(samplers.DiagonalSpec(UNI, 50, "superlog"), rng).raw_function(),
    ]
    for f in fns:
        p = simplex.random_interior(2, 300, rng)
        q = simplex.random_interior(2, 300, rng)
        assert np.max(simplex.midpoint_violation(f, p, q)) <= 1e-12 * max(1.0, np.max(np.abs(f(p))))
        assert simplex.check_concave_bounds(f, simplex.barycenter(2), 300, rng).ok


def test_metric_decreases_along_k():
    grid = 16
    Ks = [10 ** 2, 10 ** 3, 10 ** 4]
    limit = simplex.Analytic(lambda p: samplers.eval_deterministic_limit(EXP, 10.0, p), 2)
    dists = np.empty((20, len(Ks)))
    for s in range(20):
        planes = EXP.sample(replica_rng(11, s), Ks[-1])
        for j, K in enumerate(Ks):
            dists[s, j] = simplex.metric_d(simplex.SoftminEnsemble(planes[:K], 10.0), limit, 8, grid)
    med = np.median(dists, axis=0)
    assert np.all(np.diff(med) < 0)


def test_logshift_matches_exact_smoothed_envelope():
    # at finite K the logshift value minus 1/c follows psi-tilde with c_K = c log K
    K = 10 ** 4
    spec = samplers.DiagonalSpec(UNI, K, "logshift", 1.0)
    diag = map_replicas(lambda g: float(samplers.sample_diagonal(spec, g).raw(E)) - 1.0, 4000, 28)

    def tilde(g):
        env = samplers.sample_poisson_envelope(H1, CompactSlice(2, 4), g)
        return samplers.eval_psi_tilde(env, math.log(K), E).value

    assert two_sample_ks(diag, map_replicas(tilde, 4000, 29)).passed

"""The acceptance checks, each returning one aggregated ``TestReport``.

Every check runs at a pinned seed and records its sub-checks and runtime in
``details``. A check passes when all sub-checks pass within its time limit.
"""

import itertools
import math
import time

import numpy as np

from . import duality, models, portfolio, samplers, simplex, stokes
from .rng import map_replicas, replica_rng
from .softmin import softmin
from .stats import TestReport, chi_square_cdf, ks_test_exponential, two_sample_ks, within


class _Run:
    def __init__(self, name, limit, checks):
        self.name = name
        self.limit = limit
        self.checks = checks
        self.subs = []
        self.start = time.perf_counter()

    def add(self, report):
        self.subs.append(report)
        return report

    def flag(self, name, ok, value=math.nan, bound=math.nan, **extra):
        return self.add(TestReport(name, float(value), float(bound), 0, bool(ok), details=extra))

    def report(self):
        runtime = time.perf_counter() - self.start
        self.flag("runtime", runtime < self.limit, runtime, self.limit)
        failed = sum(not r.passed for r in self.subs)
        return TestReport(
            self.name, float(failed), 1.0, len(self.subs), failed == 0, self.checks,
            {"runtime_s": runtime, "limit_s": self.limit, "subchecks": [r.to_dict() for r in self.subs]},
        )


def check_softmin_sandwich(seed=7, pairs=10 ** 5):
    run = _Run("01-softmin-sandwich", 5.0, "min <= softmin <= min + log(K)/lam")
    rng = replica_rng(seed, 1)
    lengths = rng.integers(1, 33, pairs)
    worst_lo = worst_hi = -math.inf
    for k in np.unique(lengths):
        m = int(np.sum(lengths == k))
        v = rng.normal(0.0, 10.0, (m, k)) * rng.choice([1e-3, 1.0, 1e2], (m, 1))
        lam = 10.0 ** rng.uniform(-3, 3, m)
        s = softmin(v, lam)
        lo = v.min(axis=1)
        worst_lo = max(worst_lo, float(np.max(lo - s)))
        worst_hi = max(worst_hi, float(np.max(s - lo - math.log(k) / lam)))
    run.flag("lower-bound", worst_lo <= 1e-12, worst_lo, 1e-12)
    run.flag("upper-bound", worst_hi <= 1e-12, worst_hi, 1e-12)
    return run.report()


def check_deterministic_limit(seed=7, seeds=20):
    run = _Run("02-deterministic-limit", 60.0, "fixed-lam softmin converges to -(1/lam) cgf(-lam p)")
    model = models.IidExponential(n=2, rate=1.0)
    lam = 10.0
    grid = simplex.simplex_lattice(2, 32)
    target = samplers.eval_deterministic_limit(model, lam, grid)
    closed = np.sum(0.1 * np.log1p(10.0 * grid), axis=1)
    run.flag("limit-closed-form", np.max(np.abs(target - closed)) < 1e-12, np.max(np.abs(target - closed)), 1e-12)
    Ks = [10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5]
    errs = np.empty((seeds, len(Ks)))
    for s in range(seeds):
        planes = model.sample(replica_rng(seed, 100 + s), Ks[-1])
        for j, K in enumerate(Ks):
            vals = softmin(grid @ planes[:K].T, lam)
            errs[s, j] = np.max(np.abs(vals - target))
    med = np.median(errs, axis=0)
    run.flag("median-strictly-decreasing", bool(np.all(np.diff(med) < 0)), med[-1], med[0], medians=med.tolist())
    run.flag("error-at-1e5", med[-1] <= 0.01, med[-1], 0.01)
    return run.report()


def hardmin_samples(model, K, points, replicas, seed, offset=0):
    return map_replicas(lambda g: samplers.hardmin_values(model, K, points, g), replicas, seed, offset)


def poisson_samples(model, points, replicas, seed, offset=0):
    points = np.atleast_2d(points)
    return map_replicas(lambda g: samplers.sample_poisson_envelope(model, points, g)(points), replicas, seed, offset)


def check_one_point_law(seed=7, K=10 ** 4, replicas=10 ** 4):
    run = _Run("03-one-point-law", 120.0, "hardmin value^(n+alpha) is exponential with rate = integral of h over R(p,1)")
    model = models.IidUniform(n=2)
    e = simplex.barycenter(2)
    vals = hardmin_samples(model, K, e, replicas, seed, offset=300_000)
    rate = model.intensity_integral_R(e)
    run.add(ks_test_exponential(vals ** 2, rate, "ks-square-vs-exp2"))
    target = math.gamma(1.5) / math.sqrt(2.0)
    run.add(within("mean-vs-closed-form", float(vals.mean()), target, 0.02, sample_size=replicas))
    return run.report()


def check_poisson_equivalence(seed=7, K=10 ** 4, replicas=10 ** 4):
    run = _Run("04-poisson-vs-hardmin", 120.0, "Poisson-envelope values agree in law with scaled hardmin")
    pts = np.array([[0.5, 0.5], [0.3, 0.7]])
    hard = hardmin_samples(models.IidUniform(n=2), K, pts, replicas, seed, offset=400_000)
    pois = poisson_samples(models.ConstantIntensity(n=2, gamma=1.0), pts, replicas, seed, offset=500_000)
    for j, p in enumerate(pts):
        run.add(two_sample_ks(hard[:, j], pois[:, j], f"ks-at-{p.tolist()}"))
    return run.report()


def check_finite_dim_tail(seed=7, replicas=10 ** 4):
    run = _Run("05-finite-dim-tail", 60.0, "joint tail of the envelope equals exp(-integral over union of regions)")
    model = models.ConstantIntensity(n=2, gamma=1.0)
    spec = duality.RegionSpec(np.array([[0.5, 0.5], [0.2, 0.8]]), np.array([0.5, 0.4]))
    integral, ierr = duality.union_integral(model, spec, replica_rng(seed, 600_000), n_points=10 ** 6)
    target = math.exp(-integral)
    vals = poisson_samples(model, spec.points, replicas, seed, offset=610_000)
    freq = float(np.mean(np.all(vals >= spec.levels, axis=1)))
    sigma = math.sqrt(target * (1.0 - target) / replicas)
    run.add(TestReport("joint-tail", abs(freq - target), 3 * sigma, replicas, abs(freq - target) <= 3 * sigma,
                       details={"empirical": freq, "limit": target, "integral": integral, "integral_stderr": ierr}))
    return run.report()


def vertex_enumeration_min(P, a, q):
    """Brute-force ``min <q, x>`` over basic feasible points of ``{x >= 0, P x >= a}``."""
    r, n = P.shape
    A = np.vstack([P, np.eye(n)])
    b = np.concatenate([a, np.zeros(n)])
    best = math.inf
    for rows in itertools.combinations(range(r + n), n):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, b[list(rows)])
        if np.all(x >= -1e-10) and np.all(P @ x >= a - 1e-10):
            best = min(best, float(q @ x))
    return best


def check_envelope_lp(seed=7, specs=100):
    run = _Run("06-envelope-lp", 5.0, "constraint envelope by LP equals vertex enumeration")
    rng = replica_rng(seed, 700_000)
    worst = 0.0
    for _ in range(specs):
        n = int(rng.integers(2, 5))
        r = int(rng.integers(1, 5))
        spec = duality.RegionSpec(rng.dirichlet(np.ones(n), r), rng.uniform(0.1, 2.0, r))
        q = rng.dirichlet(np.ones(n))
        lp = float(duality.envelope_from_constraints(spec)(q))
        worst = max(worst, abs(lp - vertex_enumeration_min(spec.points, spec.levels, q)))
    run.flag("lp-vs-vertices", worst <= 1e-9, worst, 1e-9)
    worst1 = 0.0
    for _ in range(specs):
        n = int(rng.integers(2, 5))
        p = rng.dirichlet(np.ones(n))
        a = float(rng.uniform(0.1, 2.0))
        q = rng.dirichlet(np.ones(n))
        lp = float(duality.envelope_from_constraints(duality.RegionSpec(p[None], [a]))(q))
        worst1 = max(worst1, abs(lp - a * np.min(q / p)))
    run.flag("single-constraint-closed-form", worst1 <= 1e-12, worst1, 1e-12)
    return run.report()


def parabola():
    return simplex.Analytic(lambda p: p[..., 0] * p[..., 1], 2,
                            grad=lambda p: p[..., ::-1].copy(), name="p1*p2")


def check_stokes_volume(seed=7):
    run = _Run("07-stokes-volume", 60.0, "volume formula for smooth generators")
    psi = parabola()
    gen = stokes.C2Generator(lambda q: q[..., 0] * (1 - q[..., 0]), 2,
                             grad=lambda q: 1 - 2 * q, hess=lambda q: np.full(q.shape + (1,), -2.0))
    vol = stokes.stokes_volume(gen)
    run.add(within("quadrature", vol.value, 1.0 / 6.0, 1e-6, relative=False))
    mc = duality.tail_probability(models.ConstantIntensity(n=2), psi, 400_000, replica_rng(seed, 800_000))
    run.add(within("monte-carlo-region-volume", mc.integral, 1.0 / 6.0, 0.02))
    gm = stokes.C2Generator.from_simplex(simplex.geometric_mean([0.5, 0.5]))
    run.flag("geometric-mean-diverges", stokes.stokes_volume(gm).diverged)
    one = stokes.stokes_volume_1d(gen)
    run.add(within("one-dimensional-formula", one, vol.value, 1e-6, relative=False))
    return run.report()


def check_geometric_mean_expectation(seed=7, replicas=10 ** 4):
    run = _Run("08-mean-limit", 180.0, "mean of the limit is a weighted geometric mean")
    model = models.IndependentGamma(shapes=(1.5, 1.5))
    t = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    pts = np.stack([t, 1 - t], axis=1)
    vals = poisson_samples(model, pts, replicas, seed, offset=900_000)
    target = portfolio.expected_limit_function(model)(pts)
    for j in range(len(t)):
        run.add(within(f"mean-at-{pts[j].tolist()}", float(vals[:, j].mean()), float(target[j]), 0.03,
                       sample_size=replicas))
    return run.report()


def check_portfolio_identities(seed=7, cases=10 ** 3):
    run = _Run("09-portfolio-identities", 10.0, "portfolio weights, softmin combination and transport")
    rng = replica_rng(seed, 1_000_000)
    worst_sum = worst_comb = worst_const = worst_transport = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 6))
        K = int(rng.integers(1, 6))
        lam = float(10 ** rng.uniform(-1, 1.5))
        planes = rng.uniform(0.1, 2.0, (K, n))
        p = rng.dirichlet(np.ones(n))
        comps = [simplex.PolyhedralMin(x[None]) for x in planes]
        comb = portfolio.softmin_portfolio_combination(comps, lam, p)
        direct = portfolio.fgp_map(simplex.SoftminEnsemble(planes, lam), p)
        worst_comb = max(worst_comb, float(np.max(np.abs(comb - direct))))
        w = rng.dirichlet(np.ones(n))
        const = portfolio.fgp_map(simplex.geometric_mean(w), p)
        worst_const = max(worst_const, float(np.max(np.abs(const - w))))
        q = portfolio.dirichlet_transport(simplex.geometric_mean(np.full(n, 1.0 / n)), p)
        worst_transport = max(worst_transport, float(np.max(np.abs(q - p))))
        for out in (comb, direct, const, portfolio.fgp_map(simplex.PolyhedralMin(planes), p)):
            worst_sum = max(worst_sum, abs(float(out.sum()) - 1.0))
    run.flag("weights-sum-to-one", worst_sum <= 1e-10, worst_sum, 1e-10)
    run.flag("geometric-mean-constant-weights", worst_const <= 1e-12, worst_const, 1e-12)
    run.flag("softmin-combination", worst_comb <= 1e-9, worst_comb, 1e-9)
    run.flag("identity-transport", worst_transport <= 1e-12, worst_transport, 1e-12)
    return run.report()


def weight_samples(model, p, replicas, seed, offset):
    return map_replicas(lambda g: portfolio.portfolio_weight_sample(model, p, g), replicas, seed, offset)


def check_weight_law(seed=7, draws=10 ** 4):
    run = _Run("10-portfolio-weight-law", 120.0, "weights of the limit envelope at a point")
    p = np.array([0.3, 0.7])
    w = weight_samples(models.ConstantIntensity(n=2), p, draws, seed, 1_100_000)
    run.add(chi_square_cdf(w[:, 0], lambda y: y, name="uniform-weights-chi-square"))
    gm = models.IndependentGamma(shapes=(2.0, 1.0))
    wg = weight_samples(gm, p, draws, seed, 1_200_000)
    target = gm.constant_weights
    for i in range(2):
        run.add(within(f"mean-weight-{i}", float(wg[:, i].mean()), float(target[i]), 0.02, sample_size=draws))
    return run.report()


def check_diagonal_regimes(seed=7, K=10 ** 4, replicas=10 ** 4):
    run = _Run("11-diagonal-regimes", 180.0, "softmin with lam growing like K^(1/(n+alpha)) log K")
    model = models.IidUniform(n=2)
    e = simplex.barycenter(2)
    spec = samplers.DiagonalSpec(model, K, "logshift", 1.0)
    shifted = map_replicas(lambda g: float(samplers.sample_diagonal(spec, g).raw(e)) - 1.0, replicas, seed, 1_300_000)
    hard = hardmin_samples(model, K, e, replicas, seed, offset=1_400_000)
    ks = run.add(two_sample_ks(shifted, hard, "ks-logshift-minus-one-vs-hardmin"))
    ks.details["mean_difference"] = float(shifted.mean() - hard.mean())
    rng = replica_rng(seed, 1_500_000)
    worst = 0.0
    for c in (0.5, 1.0, 3.0):
        lin = samplers.DiagonalSpec(model, K, "linear", c)
        f = samplers.sample_diagonal(lin, rng)
        pts = simplex.random_interior(2, 50, rng)
        direct = []
        for p in pts:
            v = lin.lam / lin.scale * (p @ (lin.scale * f.planes).T)
            direct.append(-(np.log(np.sum(np.exp(-(v - v.min())))) - v.min()) / (lin.lam / lin.scale))
        worst = max(worst, float(np.max(np.abs(f(pts) - np.array(direct)))))
    run.flag("linear-identity", worst <= 1e-10, worst, 1e-10)
    lin = samplers.DiagonalSpec(model, K, "linear", 1.0)
    near = np.array([1e-3, 1 - 1e-3])
    found = [s for s in range(10) if samplers.sample_diagonal(lin, replica_rng(seed, 1_600_000 + s))(near) < 0]
    run.flag("negative-near-boundary", bool(found), len(found), 1, seeds=found)
    return run.report()


def _structural_functions(seed, count):
    rng = replica_rng(seed, 1_700_000)
    uni = models.IidUniform(n=3)
    expo = models.IidExponential(n=3)
    fns = []
    for i in range(count):
        kind = i % 4
        if kind == 0:
            fns.append(samplers.sample_hardmin_scaled(uni, 100, rng))
        elif kind == 1:
            fns.append(samplers.sample_softmin_fixed_lambda(expo, 100, 10.0, rng))
        elif kind == 2:
            fns.append(samplers.sample_poisson_envelope(models.ConstantIntensity(n=3), simplex.CompactSlice(3, 10), rng))
        else:
            spec = samplers.DiagonalSpec(uni, 100, "superlog")
            fns.append(samplers.sample_diagonal(spec, rng).raw_function())
    return fns


def check_structural_invariants(seed=7, functions=10 ** 3, points=10 ** 3):
    run = _Run("12-structural-invariants", 60.0, "midpoint concavity and the interior bounds of concave functions")
    rng = replica_rng(seed, 1_800_000)
    mid_bad = bound_bad = 0
    for f in _structural_functions(seed, functions):
        p = simplex.random_interior(3, points, rng)
        q = simplex.random_interior(3, points, rng)
        scale = np.maximum(1.0, np.abs(f(p)))
        mid_bad += int(np.sum(simplex.midpoint_violation(f, p, q) > 1e-12 * scale))
        rep = simplex.check_concave_bounds(f, q[0], points, rng)
        bound_bad += int(not rep.ok)
    run.flag("midpoint-violations", mid_bad == 0, mid_bad, 0)
    run.flag("bound-violations", bound_bad == 0, bound_bad, 0)
    return run.report()


CHECKS = {
    "softmin-sandwich": check_softmin_sandwich,
    "deterministic-limit": check_deterministic_limit,
    "one-point-law": check_one_point_law,
    "poisson-vs-hardmin": check_poisson_equivalence,
    "finite-dim-tail": check_finite_dim_tail,
    "envelope-lp": check_envelope_lp,
    "stokes-volume": check_stokes_volume,
    "mean-limit": check_geometric_mean_expectation,
    "portfolio-identities": check_portfolio_identities,
    "portfolio-weight-law": check_weight_law,
    "diagonal-regimes": check_diagonal_regimes,
    "structural-invariants": check_structural_invariants,
}


def run_suite(names=None, seed=7):
    names = list(CHECKS) if names in (None, "all", ["all"]) else names
    return [CHECKS[name](seed=seed) for name in names]

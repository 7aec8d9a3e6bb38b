"""Regions of hyperplane coefficients and tail probabilities of the limit law.

``R(p, a) = {x > 0 : <p, x> < a}``. A concave ``psi`` determines the union
``R-hat(psi)`` of ``R(p, psi(p))`` over the simplex; the limit law puts mass
``exp(-integral of h over R-hat(psi))`` on ``{omega >= psi}``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .lp import simplex_max
from .models import ConstantIntensity, IidExponential, IidUniform
from .rng import replica_rng
from .simplex import ConcaveFn, as_point, simplex_lattice
from .stokes import C2Generator, NotConcave, stokes_volume


@dataclass(frozen=True)
class RegionSpec:
    """Anchor points ``p^(i)`` (rows) and levels ``a_i``."""

    points: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(as_point(self.points))
        lev = np.atleast_1d(np.asarray(self.levels, dtype=float))
        if pts.shape[0] != lev.size or lev.size == 0:
            raise ValueError("need one level per anchor point")
        if np.any(lev <= 0):
            raise ValueError("levels must be positive")
        gaps = np.abs(pts[:, None, :] - pts[None, :, :]).max(axis=-1)
        if np.any(gaps[np.triu_indices(lev.size, 1)] <= 1e-12):
            raise ValueError("anchor points must be distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "levels", lev)

    @property
    def r(self):
        return self.levels.size

    @property
    def n(self):
        return self.points.shape[1]


def region_contains(spec, x):
    """True where ``<p^(i), x> < a_i`` for some ``i``."""
    x = np.asarray(x, dtype=float)
    return np.any(x @ spec.points.T < spec.levels, axis=-1)[()]


class ConstraintEnvelope(ConcaveFn):
    """Smallest concave function with ``psi(p^(i)) >= a_i``.

    ``psi(q) = min <q, x>`` over ``{x >= 0 : <p^(i), x> >= a_i}``; each value
    solves the dual program ``max a.y`` subject to ``P^T y <= q``, ``y >= 0``.
    The optimal ``x`` is a supergradient.
    """

    def __init__(self, spec):
        self.spec = spec
        self.n = spec.n

    def _solve(self, q):
        value, _, x = simplex_max(self.spec.levels, self.spec.points.T, q)
        return value, x

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        flat = q.reshape(-1, self.n)
        out = np.array([self._solve(row)[0] for row in flat])
        return out.reshape(q.shape[:-1])[()]

    def gradient(self, q):
        q = np.asarray(q, dtype=float)
        flat = q.reshape(-1, self.n)
        return np.array([self._solve(row)[1] for row in flat]).reshape(q.shape)


def envelope_from_constraints(spec):
    return ConstraintEnvelope(spec)


def _drop_contained(spec):
    """Remove regions contained in another one (``R(p,a)`` has vertices ``a/p_i e_i``)."""
    ext = spec.levels[:, None] / spec.points
    keep = []
    for i in range(spec.r):
        covers = np.all(ext[i] <= ext, axis=1)
        same = np.all(ext[i] == ext, axis=1)
        # a copy with a lower index also counts as covering
        covers &= ~same | (np.arange(spec.r) < i)
        if not covers.any():
            keep.append(i)
    return spec.points[keep], spec.levels[keep]


def union_integral(model, spec, rng=None, n_points=200_000):
    """``integral of h over the union of R(p^(i), a_i)`` with a standard error.

    Contained regions are dropped exactly. Up to three regions use
    inclusion-exclusion with intersections estimated from points drawn from
    ``h`` restricted to one region; more regions use the coverage-weighted
    estimator ``sum_i m(R_i) E_i[1 / #regions covering x]``.
    """
    rng = replica_rng(0) if rng is None else rng
    pts, lev = _drop_contained(spec)
    masses = np.array([model.intensity_integral_R(p, a) for p, a in zip(pts, lev)])
    r = lev.size
    if r == 1:
        return float(masses[0]), 0.0
    if r <= 3:
        total, var = float(masses.sum()), 0.0
        for i in range(r - 1):
            x = model.sample_region(rng, n_points, pts[i], lev[i])
            inside = x @ pts[i + 1:].T < lev[i + 1:]
            for j in range(i + 1, r):
                hit = inside[:, j - i - 1]
                total -= masses[i] * hit.mean()
                var += masses[i] ** 2 * hit.var() / n_points
            if i == 0 and r == 3:
                hit = inside.all(axis=1)
                total += masses[0] * hit.mean()
                var += masses[0] ** 2 * hit.var() / n_points
        return float(total), math.sqrt(var)
    total, var = 0.0, 0.0
    for i in range(r):
        x = model.sample_region(rng, n_points, pts[i], lev[i])
        w = 1.0 / np.sum(x @ pts.T < lev, axis=1)
        total += masses[i] * w.mean()
        var += masses[i] ** 2 * w.var() / n_points
    return float(total), math.sqrt(var)


def finite_dim_tail(model, spec, rng=None, n_points=200_000):
    """``exp(-integral of h over R-hat(p, a))``: the limit probability of ``{psi(p^(i)) >= a_i for all i}``."""
    integral, _ = union_integral(model, spec, rng, n_points)
    return math.exp(-integral)


@dataclass
class TailEstimate:
    estimate: float
    stderr: float
    integral: float
    integral_stderr: float
    diverged: bool = False
    truncated: bool = False


def _psi_at(psi, p):
    return np.asarray(psi(p), dtype=float)


def _coordinate_bounds(psi, n, cap):
    """``sup psi(p) / p_i`` per coordinate; ``None`` entries where it looks unbounded."""
    bounds = np.zeros(n)
    unbounded = np.zeros(n, dtype=bool)
    face = simplex_lattice(n - 1, 12 if n > 2 else 1)
    s = np.concatenate([np.logspace(-12, -1, 23), np.linspace(0.1, 1.0, 37)])
    for i in range(n):
        others = np.insert(face, i, 0.0, axis=1)
        e = np.zeros(n)
        e[i] = 1.0
        p = (1.0 - s)[:, None, None] * others[None] + s[:, None, None] * e
        p = np.clip(p, 1e-15, None)
        p /= p.sum(axis=-1, keepdims=True)
        ratio = _psi_at(psi, p) / p[..., i]
        bounds[i] = np.max(ratio)
        near, mid = np.max(ratio[0]), np.max(ratio[10])  # s = 1e-12 and s = 1e-7
        unbounded[i] = near > 2.0 * mid and near > 1e-12
    bounds = np.where(unbounded, cap, np.minimum(1.05 * bounds, cap))
    return bounds, unbounded


def _golden_min(fun, lo, hi, iters=60):
    """Vectorised golden-section minimisation of convex ``fun`` on ``[lo, hi]``."""
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo.copy(), hi.copy()
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - ratio * (b - a)
        new_d = a + ratio * (b - a)
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
        fc, fd = np.where(left, fun(c), fc), np.where(left, fd, fun(d))
    return np.minimum(fc, fd)


def _project_simplex(v, floor=1e-12):
    n = v.shape[-1]
    u = -np.sort(-v, axis=-1)
    css = np.cumsum(u, axis=-1) - 1.0
    k = np.arange(1, n + 1)
    cond = u - css / k > 0
    rho = n - np.argmax(cond[..., ::-1], axis=-1)
    theta = np.take_along_axis(css, (rho - 1)[..., None], axis=-1) / rho[..., None]
    p = np.maximum(v - theta, floor)
    return p / p.sum(axis=-1, keepdims=True)


def in_hat_region(psi, x, grid=None):
    """True where ``min_p <p, x> - psi(p) < 0`` over the open simplex.

    The objective is convex in ``p``. A lattice search is refined by golden
    section for ``n = 2`` and by projected gradient descent for ``n >= 3``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[1]
    lattice = simplex_lattice(n, grid or (64 if n == 2 else 24))
    lattice = 1e-12 + (1.0 - n * 1e-12) * lattice
    gvals = _psi_at(psi, lattice)
    F = x @ lattice.T - gvals
    best = np.argmin(F, axis=1)
    fmin = F[np.arange(len(x)), best]
    if n == 2:
        g = lattice.shape[0] - 1
        t = lattice[:, 0]
        lo = t[np.maximum(best - 1, 0)]
        hi = t[np.minimum(best + 1, g)]
        # lattice row j has p_1 = j / g when built by stars and bars; sort to be safe
        order = np.argsort(t)
        if not np.all(order == np.arange(g + 1)):
            t_sorted = t[order]
            rank = np.argsort(order)[best]
            lo = t_sorted[np.maximum(rank - 1, 0)]
            hi = t_sorted[np.minimum(rank + 1, g)]

        def fun(s):
            p = np.stack([s, 1.0 - s], axis=-1)
            return np.sum(p * x, axis=1) - _psi_at(psi, p)

        return np.minimum(fmin, _golden_min(fun, lo, hi)) < 0
    h = 1.0 / (grid or 24)
    lip = float(np.max(np.abs(np.asarray(psi.gradient(lattice)))))
    margin = 2.0 * h * (np.max(x, axis=1) + lip)
    todo = np.flatnonzero((fmin >= 0) & (fmin < margin))
    result = fmin < 0
    if todo.size:
        xs = x[todo]
        p = lattice[best[todo]]
        low = fmin[todo]
        for it in range(200):
            grad = xs - np.asarray(psi.gradient(p))
            step = 0.5 * h / (1.0 + 0.05 * it) / np.maximum(np.linalg.norm(grad, axis=1), 1e-12)
            p = _project_simplex(p - step[:, None] * grad)
            low = np.minimum(low, np.sum(p * xs, axis=1) - _psi_at(psi, p))
        result[todo] = low < 0
    return result


def _is_constant_h(model):
    return isinstance(model, (ConstantIntensity, IidUniform, IidExponential))


def tail_probability(model, psi, mc_points=200_000, rng=None, box_cap=1e3, exact_regions=True):
    """``exp(-integral of h over R-hat(psi))`` by Monte Carlo.

    Points are drawn from ``h`` normalised on the box ``prod [0, sup psi(p)/p_i]``,
    which contains ``R-hat(psi)``. When that bound is infinite and ``n = 2``
    with constant ``h``, the volume formula decides divergence (estimate 0,
    ``diverged`` set); other unbounded cases are truncated at ``box_cap``
    and flagged. For a ``ConstraintEnvelope`` membership is the finite union
    of its regions unless ``exact_regions`` is false.
    """
    rng = replica_rng(0) if rng is None else rng
    n = psi.n
    truncated = False
    if isinstance(psi, ConstraintEnvelope) and exact_regions:
        spec = psi.spec
        bounds = np.max(spec.levels[:, None] / spec.points, axis=0)

        def member(x):
            return region_contains(spec, x)
    else:
        top = np.max(_psi_at(psi, 1e-12 + (1 - n * 1e-12) * simplex_lattice(n, 16)))
        if top <= 0:
            return TailEstimate(1.0, 0.0, 0.0, 0.0)
        bounds, unbounded = _coordinate_bounds(psi, n, box_cap)
        if np.any(unbounded):
            if n == 2 and _is_constant_h(model):
                try:
                    vol = stokes_volume(C2Generator.from_simplex(psi))
                except NotConcave:
                    vol = None
                if vol is not None and vol.diverged:
                    return TailEstimate(0.0, 0.0, math.inf, 0.0, diverged=True)
            truncated = True

        def member(x):
            return in_hat_region(psi, x)

    mass = model.box_mass(bounds)
    hits = 0
    done = 0
    batch = 50_000
    while done < mc_points:
        m = min(batch, mc_points - done)
        x = model.sample_box(rng, m, bounds)
        hits += int(np.sum(member(x)))
        done += m
    frac = hits / mc_points
    integral = mass * frac
    ierr = mass * math.sqrt(frac * (1 - frac) / mc_points)
    tail = math.exp(-integral)
    return TailEstimate(tail, tail * ierr, integral, ierr, truncated=truncated)

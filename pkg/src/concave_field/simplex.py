"""Points of the unit simplex and concave functions on it.

Functions are evaluated on arrays of points with shape ``(..., n)``; a single
point returns a scalar. Three representations are provided: the minimum of
finitely many positive affine functions (``PolyhedralMin``), a scaled softmin
of them (``SoftminEnsemble``) and closed-form evaluators (``Analytic``).
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .softmin import softmin, softmin_weights

SUM_TOL = 1e-12
TIE_TOL = 1e-12
FD_STEP = 1e-6


class EmptyEnsemble(ValueError):
    pass


def as_point(p, allow_boundary=False):
    """Validate a point (or array of points) of the simplex."""
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or p.shape[-1] < 2:
        raise ValueError("a simplex point needs at least two coordinates")
    if np.any(np.abs(p.sum(axis=-1) - 1.0) > SUM_TOL):
        raise ValueError("coordinates must sum to 1")
    if allow_boundary:
        if np.any(p < 0):
            raise ValueError("coordinates must be non-negative")
    elif np.any(p <= 0):
        raise ValueError("interior points need strictly positive coordinates")
    return p


def renormalize(p):
    p = np.asarray(p, dtype=float)
    return p / p.sum(axis=-1, keepdims=True)


def barycenter(n):
    return np.full(n, 1.0 / n)


def slice_center(j, eps, n):
    """Center of the slice ``{p_j = eps}`` of the simplex."""
    c = np.full(n, (1.0 - eps) / (n - 1))
    c[j] = eps
    return c


def random_interior(n, size, rng):
    """Uniformly distributed interior points."""
    return rng.dirichlet(np.ones(n), size=size)


def simplex_lattice(n, g):
    """All points ``j / g`` of the closed simplex with integer ``j`` summing to ``g``."""
    if g < 1:
        raise ValueError("lattice resolution must be >= 1")
    rows = []
    for bars in itertools.combinations(range(g + n - 1), n - 1):
        edges = (-1,) + bars + (g + n - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(n)])
    return np.asarray(rows, dtype=float) / g


@dataclass(frozen=True)
class CompactSlice:
    """The compact set ``{p : p_i >= 1/k}`` sampled by a barycentric lattice."""

    n: int
    k: float
    grid: int = 10

    def __post_init__(self):
        if self.k < self.n:
            raise ValueError("slice is empty unless k >= n")

    @property
    def floor(self):
        return 1.0 / self.k

    def points(self):
        lat = simplex_lattice(self.n, self.grid)
        return self.floor + (1.0 - self.n * self.floor) * lat

    def vertices(self):
        return self.floor + (1.0 - self.n * self.floor) * np.eye(self.n)


class ConcaveFn:
    """Base class: subclasses implement ``__call__`` and ``gradient``."""

    signed = False
    n = None

    def gradient(self, p):
        """Central finite-difference gradient in ambient coordinates."""
        p = np.asarray(p, dtype=float)
        g = np.empty(p.shape)
        for i in range(p.shape[-1]):
            dp = np.zeros(p.shape[-1])
            dp[i] = FD_STEP
            g[..., i] = (self(p + dp) - self(p - dp)) / (2 * FD_STEP)
        return g


def _planes(planes):
    x = np.atleast_2d(np.asarray(planes, dtype=float))
    if x.shape[0] == 0 or x.size == 0:
        raise EmptyEnsemble("no hyperplanes given")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("hyperplane coefficients must be finite and non-negative")
    return x


class PolyhedralMin(ConcaveFn):
    """``p -> min_k <p, x_k>`` for coefficient rows ``x_k``."""

    def __init__(self, planes):
        self.planes = _planes(planes)
        self.n = self.planes.shape[1]

    def values(self, p):
        return np.asarray(p, dtype=float) @ self.planes.T

    def __call__(self, p):
        return np.min(self.values(p), axis=-1)[()]

    def active(self, p):
        """Index of the active plane (lowest index on ties) and a tie flag."""
        v = self.values(p)
        idx = np.argmin(v, axis=-1)
        vmin = np.take_along_axis(v, idx[..., None], axis=-1)
        tie = np.sum(v - vmin <= TIE_TOL, axis=-1) > 1
        return idx[()], tie[()]

    def gradient(self, p):
        idx, _ = self.active(p)
        return self.planes[idx]


class SoftminEnsemble(ConcaveFn):
    """``p -> scale * m_lam(<p, x_1>, ..., <p, x_K>) + offset``.

    ``offset`` is kept apart from the ensemble so normalised and raw values
    can both be read off.
    """

    def __init__(self, planes, lam, scale=1.0, offset=0.0):
        if not (scale > 0):
            raise ValueError("scale must be positive")
        self.planes = _planes(planes)
        self.n = self.planes.shape[1]
        self.lam = lam
        self.scale = float(scale)
        self.offset = float(offset)
        self.signed = offset < 0
        softmin([0.0], lam)  # validates lam

    def raw(self, p):
        """The ensemble value without the additive offset."""
        v = np.asarray(p, dtype=float) @ self.planes.T
        return self.scale * softmin(v, self.lam)

    def __call__(self, p):
        return self.raw(p) + self.offset

    def raw_function(self):
        """The same ensemble with the offset dropped."""
        return SoftminEnsemble(self.planes, self.lam, self.scale)

    def gradient(self, p):
        v = np.asarray(p, dtype=float) @ self.planes.T
        return self.scale * (softmin_weights(v, self.lam) @ self.planes)


class Analytic(ConcaveFn):
    """Closed-form evaluator with optional gradient and Hessian callables."""

    def __init__(self, func, n, grad=None, hess=None, signed=False, name=None):
        self.func = func
        self.n = n
        self._grad = grad
        self.hess = hess
        self.signed = signed
        self.name = name or getattr(func, "__name__", "analytic")

    def __call__(self, p):
        return np.asarray(self.func(np.asarray(p, dtype=float)))[()]

    def gradient(self, p):
        if self._grad is None:
            return super().gradient(p)
        return np.asarray(self._grad(np.asarray(p, dtype=float)))

    def __repr__(self):
        return f"Analytic({self.name}, n={self.n})"


def constant(c, n):
    return Analytic(
        lambda p: np.full(p.shape[:-1], float(c)),
        n,
        grad=lambda p: np.zeros(p.shape),
        name=f"constant({c})",
    )


def geometric_mean(weights, scale=1.0):
    """``scale * prod p_i ** w_i``; concave for non-negative weights summing to at most 1."""
    w = np.asarray(weights, dtype=float)

    def f(p):
        return scale * np.prod(p ** w, axis=-1)

    def grad(p):
        return f(p)[..., None] * w / p

    return Analytic(f, w.size, grad=grad, name=f"geometric_mean({w.tolist()})")


def midpoint_violation(f, p, q):
    """``(f(p) + f(q)) / 2 - f((p + q) / 2)``; positive values break concavity."""
    return 0.5 * (f(p) + f(q)) - f(0.5 * (np.asarray(p) + np.asarray(q)))


def metric_d(f, g, k_max, grid=64, return_bound=False):
    """Truncated local-uniform metric between two functions.

    Sums ``2**-k * min(sup |f - g|, 1)`` for ``k = n .. k_max`` with the sup
    taken over a lattice of ``{p_i >= 1/k}``. The omitted tail adds at most
    ``2**-k_max``, so the true distance lies in ``[value - grid error,
    value + 2**-k_max]``.
    """
    n = f.n if f.n is not None else g.n
    if k_max < n or grid < 2:
        raise ValueError("need k_max >= n and grid >= 2")
    total = 0.0
    for k in range(n, k_max + 1):
        pts = CompactSlice(n, k, grid).points()
        gap = float(np.max(np.abs(np.asarray(f(pts)) - np.asarray(g(pts)))))
        total += 2.0 ** -k * min(gap, 1.0)
    if return_bound:
        return total, 2.0 ** -k_max
    return total


def boundary_distance(q):
    """Distance from ``q`` to the relative boundary, inside the simplex's affine hull."""
    q = np.asarray(q, dtype=float)
    n = q.shape[-1]
    return np.min(q, axis=-1) * math.sqrt(n / (n - 1))


def concave_bound_constant(q):
    """``diam / dist(q, boundary)``: the constant with ``f(p) <= M_q f(q)``."""
    return math.sqrt(2.0) / boundary_distance(q)


@dataclass
class BoundsReport:
    samples: int
    max_violation_q: float
    max_violation_center: float

    @property
    def ok(self):
        return max(self.max_violation_q, self.max_violation_center) <= 1e-9


def check_concave_bounds(f, q, samples, rng):
    """Test ``f(p) <= M_q f(q)`` and ``f(p) <= n f(barycenter)`` at random interior points."""
    q = as_point(q)
    n = q.size
    pts = random_interior(n, samples, rng)
    vals = np.asarray(f(pts))
    mq = concave_bound_constant(q)
    return BoundsReport(
        samples=samples,
        max_violation_q=float(np.max(vals - mq * f(q))),
        max_violation_center=float(np.max(vals - n * f(barycenter(n)))),
    )

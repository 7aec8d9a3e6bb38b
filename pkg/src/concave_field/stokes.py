"""Volume of ``R-hat(psi)`` for smooth generators.

For a C^2 concave ``psi`` vanishing on the boundary of the simplex,
``vol = (1/n) * integral over D of psi(q) det(-D^2 psi(q)) dq`` where ``q``
are the first ``n - 1`` barycentric coordinates and ``D = {q > 0, sum q < 1}``.
For ``n = 2`` this reduces to ``(1/2) * integral_0^1 psi'(q)^2 dq``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import graded_gauss_legendre, graded_simplex_rule

HESS_STEP = 1e-5
GRAD_STEP = 1e-6
PSD_FLOOR = -1e-8
EPS_LEVELS = (1e-2, 1e-3, 1e-4)
GROWTH = 0.1


class NotConcave(ValueError):
    pass


class PreconditionFailed(ValueError):
    pass


def _embed(q):
    q = np.asarray(q, dtype=float)
    return np.concatenate([q, 1.0 - q.sum(axis=-1, keepdims=True)], axis=-1)


class C2Generator:
    """``psi`` in the coordinates ``q`` of ``D``, with optional exact derivatives."""

    def __init__(self, psi, n, grad=None, hess=None, boundary_zero=True, name=None):
        self.psi = psi
        self.n = n
        self._grad = grad
        self._hess = hess
        self.boundary_zero = boundary_zero
        self.name = name or getattr(psi, "__name__", "psi")

    @classmethod
    def from_simplex(cls, f, hess=None, boundary_zero=True, name=None):
        """Wrap a function of ``p`` (a ``ConcaveFn``, optionally with ``hess(p)``)."""
        n = f.n

        def psi(q):
            return np.asarray(f(_embed(q)))

        def grad(q):
            g = np.asarray(f.gradient(_embed(q)))
            return g[..., :-1] - g[..., -1:]

        hq = None
        if hess is not None:
            J = np.vstack([np.eye(n - 1), -np.ones((1, n - 1))])

            def hq(q):
                return J.T @ np.asarray(hess(_embed(q))) @ J

        return cls(psi, n, grad=grad, hess=hq, boundary_zero=boundary_zero, name=name or repr(f))

    @property
    def exact_hessian(self):
        return self._hess is not None

    def __call__(self, q):
        return np.asarray(self.psi(np.asarray(q, dtype=float)))

    def gradient(self, q):
        q = np.asarray(q, dtype=float)
        if self._grad is not None:
            return np.asarray(self._grad(q))
        d = q.shape[-1]
        g = np.empty(q.shape)
        for i in range(d):
            e = np.zeros(d)
            e[i] = GRAD_STEP
            g[..., i] = (self(q + e) - self(q - e)) / (2 * GRAD_STEP)
        return g

    def hessian(self, q):
        """Exact Hessian if given, else symmetrised central differences of the gradient."""
        q = np.asarray(q, dtype=float)
        if self._hess is not None:
            return np.asarray(self._hess(q))
        d = q.shape[-1]
        H = np.empty(q.shape + (d,))
        for j in range(d):
            e = np.zeros(d)
            e[j] = HESS_STEP
            H[..., :, j] = (self.gradient(q + e) - self.gradient(q - e)) / (2 * HESS_STEP)
        return 0.5 * (H + np.swapaxes(H, -1, -2))


@dataclass
class VolumeResult:
    value: float
    diverged: bool
    partials: list = field(default_factory=list)

    def __float__(self):
        return self.value


def _shrunk_rule(dim, eps, order):
    if dim == 1:
        s, w = graded_gauss_legendre(order, 10)
        s = s[:, None]
    else:
        s, w = graded_simplex_rule(dim, order, depth=6)
    scale = 1.0 - (dim + 1) * eps
    return eps + scale * s, w * scale ** dim


def _check_concave(g, H):
    eig = np.linalg.eigvalsh(-H)
    size = np.maximum(1.0, np.max(np.abs(H), axis=(-1, -2)))
    # finite-difference Hessians carry rounding noise of order 1e-6
    floor = PSD_FLOOR if g.exact_hessian else -1e-5
    if np.any(eig.min(axis=-1) < floor * size):
        raise NotConcave("negative Hessian has a negative eigenvalue")


def partial_volume(g, eps, order=20, check=False):
    """The volume integral over ``{q_i >= eps, sum q <= 1 - eps}``."""
    q, w = _shrunk_rule(g.n - 1, eps, order)
    H = g.hessian(q)
    if check:
        _check_concave(g, H)
    integrand = g(q) * np.linalg.det(-H)
    return float(np.sum(w * integrand)) / g.n


def stokes_volume(g, quadrature_order=20, eps_levels=EPS_LEVELS, growth=GROWTH):
    """Volume of ``R-hat(psi)`` from integrals over shrinking domains.

    Divergence is declared when the last partial integral exceeds the previous
    one by more than ``growth`` (relative); this is a heuristic and is flagged
    in the result. Otherwise the partials are extrapolated by Aitken's method.
    """
    if not g.boundary_zero:
        raise PreconditionFailed("the volume formula needs psi = 0 on the boundary")
    parts = [partial_volume(g, eps, quadrature_order, check=(i == 0)) for i, eps in enumerate(eps_levels)]
    v1, v2, v3 = parts[-3:]
    scale = max(abs(v2), 1e-300)
    if abs(v3) < 1e-300 and abs(v2) < 1e-300:
        return VolumeResult(0.0, False, parts)
    if (v3 - v2) / scale > growth:
        return VolumeResult(math.inf, True, parts)
    d1, d2 = v2 - v1, v3 - v2
    value = v3
    if d1 != d2 and abs(d2) < abs(d1):
        correction = d2 * d2 / (d1 - d2)
        if abs(correction) <= abs(d2):
            value = v3 + correction
    return VolumeResult(value, False, parts)


def stokes_volume_1d(g, quadrature_order=20, tol=1e-4):
    """``(1/2) * integral_0^1 psi'(q)^2 dq`` for ``n = 2``.

    Requires ``psi psi' -> 0`` at both ends, checked at ``1e-6`` from each end.
    """
    if g.n != 2:
        raise ValueError("the one-dimensional formula is for n = 2")
    ends = np.array([[1e-6], [1.0 - 1e-6]])
    edge = np.abs(g(ends) * g.gradient(ends)[:, 0])
    if np.any(~np.isfinite(edge)) or np.any(edge >= tol):
        raise PreconditionFailed(f"psi * psi' at the endpoints is {edge.tolist()}")
    q, w = graded_gauss_legendre(quadrature_order, 10)
    d = g.gradient(q[:, None])[:, 0]
    return 0.5 * float(np.sum(w * d * d))

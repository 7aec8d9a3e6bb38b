"""Portfolio maps generated by concave functions on the simplex.

A positive concave ``Phi`` generates the weights
``pi_i = p_i (1 + d_i - <d, p>)`` with ``d = grad log Phi(p)``.
"""

import math

import numpy as np

from .models import DomainError
from .quadrature import simplex_integrate
from .samplers import sample_poisson_envelope
from .simplex import PolyhedralMin, as_point, geometric_mean
from .softmin import softmin, softmin_weights


def fgp_map(phi, p, return_tie=False):
    """Portfolio weights generated by ``phi`` at ``p`` (rows of ``p`` allowed).

    At a tie of a ``PolyhedralMin`` the lowest-index active plane is used,
    which is one element of the superdifferential.
    """
    p = np.asarray(p, dtype=float)
    val = np.asarray(phi(p), dtype=float)
    if np.any(val <= 0):
        raise DomainError("generating function must be positive at p")
    d = np.asarray(phi.gradient(p)) / val[..., None]
    pi = p * (1.0 + d - np.sum(d * p, axis=-1, keepdims=True))
    if return_tie:
        tie = phi.active(p)[1] if isinstance(phi, PolyhedralMin) else np.zeros(val.shape, dtype=bool)
        return pi, tie
    return pi


def softmin_portfolio_combination(phis, lam, p):
    """Weights of ``softmin_lam(phi_1, ..., phi_K)`` built from the components' weights.

    ``pi = (1 - sum a) p + sum a_k pi_k`` with ``a_k = w_k phi_k / phi`` and
    ``w`` the softmin weights.
    """
    p = np.asarray(p, dtype=float)
    vals = np.stack([np.asarray(f(p), dtype=float) for f in phis], axis=-1)
    if np.any(vals <= 0):
        raise DomainError("component functions must be positive at p")
    total = softmin(vals, lam)
    a = softmin_weights(vals, lam) * vals / np.asarray(total)[..., None]
    parts = np.stack([fgp_map(f, p) for f in phis], axis=-2)
    return (1.0 - a.sum(axis=-1))[..., None] * p + np.sum(a[..., None] * parts, axis=-2)


def portfolio_weight_sample(model, p, rng):
    """``p * Z / <p, Z>`` for the point ``Z`` of a Poisson envelope attaining the minimum at ``p``."""
    p = as_point(p)
    env = sample_poisson_envelope(model, p[None, :], rng)
    idx, _ = env.active(p)
    z = env.points[idx]
    return p * z / (p @ z)


def portfolio_weight_density(model, p, y, normalized=True):
    """Density of the sampled weights w.r.t. the uniform law on the simplex: ``∝ h(y / p)``.

    The normalising constant is computed by quadrature over the first
    ``n - 1`` coordinates.
    """
    p = np.asarray(p, dtype=float)
    y = np.asarray(y, dtype=float)
    dens = model.h(y / p)
    if not normalized:
        return dens
    a = model.alphas
    n = model.n

    def smooth(u):
        full = np.concatenate([u, 1.0 - u.sum(axis=-1, keepdims=True)], axis=-1)
        return model.h(full / p) / np.prod(full ** a, axis=-1)

    # uniform probability on the simplex has density (n-1)! in these coordinates
    c = simplex_integrate(smooth, n - 1, order=12, powers=a[:-1], slack_power=a[-1])
    return dens / (c * math.factorial(n - 1))


def expected_limit_function(model):
    """``E Psi(p) = L * prod p_i ** ((1 + alpha_i) / (n + alpha))`` as an evaluator."""
    L = math.gamma(1.0 + 1.0 / model.index) * model.M ** (-1.0 / model.index)
    return geometric_mean(model.constant_weights, scale=L)


def dirichlet_transport(phi, p):
    """``q = p ⊙ pi(p^-1)`` with ``p^-1 ∝ 1/p`` and ``a ⊙ b ∝ a * b``."""
    p = np.asarray(p, dtype=float)
    inv = 1.0 / p
    inv = inv / inv.sum(axis=-1, keepdims=True)
    pi = fgp_map(phi, inv)
    q = p * pi
    return q / q.sum(axis=-1, keepdims=True)

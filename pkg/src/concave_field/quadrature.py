"""Tensor quadrature over the corner simplex ``{y >= 0, sum(y) < 1}``.

The simplex is mapped to the unit cube by stick-breaking,
``y_i = t_i * prod_{j<i} (1 - t_j)``. Power factors ``y_i ** a_i`` and
``(1 - sum y) ** b`` turn into Jacobi weights in the ``t`` coordinates, so
product-form integrands are integrated exactly.
"""

import itertools
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_jacobi, roots_legendre


@lru_cache(maxsize=256)
def gauss_jacobi_01(order, a=0.0, b=0.0):
    """Nodes and weights on [0, 1] for the weight ``t**a * (1 - t)**b``."""
    if a <= -1 or b <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    x, w = roots_jacobi(order, b, a)
    return (x + 1.0) / 2.0, w / 2.0 ** (a + b + 1.0)


@lru_cache(maxsize=64)
def graded_gauss_legendre(order, depth=10):
    """Composite Gauss-Legendre rule on [0, 1], geometrically graded at both ends.

    Panel edges are ``0, 10**-depth, ..., 0.1, 0.5`` mirrored about 1/2.
    """
    x, w = roots_legendre(order)
    left = [0.0] + [10.0 ** -k for k in range(depth, 0, -1)] + [0.5]
    edges = left + [1.0 - e for e in reversed(left[:-1])]
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes.append(lo + (hi - lo) * (x + 1.0) / 2.0)
        weights.append(w * (hi - lo) / 2.0)
    return np.concatenate(nodes), np.concatenate(weights)


def stick_breaking(t):
    """Map cube coordinates ``t`` with shape (..., d) onto the corner simplex."""
    t = np.asarray(t, dtype=float)
    rem = np.cumprod(1.0 - t, axis=-1)
    lead = np.concatenate([np.ones(t.shape[:-1] + (1,)), rem[..., :-1]], axis=-1)
    return t * lead


def simplex_integrate(g, dim, order=20, powers=None, slack_power=0.0):
    """Integrate ``prod y_i**powers_i * (1 - sum y)**slack_power * g(y)`` over the corner simplex.

    ``g`` is vectorised over rows of shape ``(m, dim)``. For constant ``g`` the
    result equals the Dirichlet integral exactly (up to rounding).
    """
    a = np.zeros(dim) if powers is None else np.asarray(powers, dtype=float)
    rules = []
    for j in range(dim):
        # Jacobian contributes (1 - t_j)**(dim - 1 - j); later powers and slack add theirs.
        b = (dim - 1 - j) + a[j + 1:].sum() + slack_power
        rules.append(gauss_jacobi_01(order, float(a[j]), float(b)))
    nodes = np.array(list(itertools.product(*[r[0] for r in rules])))
    weights = np.prod(np.array(list(itertools.product(*[r[1] for r in rules]))), axis=1)
    return float(np.sum(weights * np.asarray(g(stick_breaking(nodes)))))


def graded_simplex_rule(dim, order=20, depth=10):
    """Nodes and weights on the corner simplex from graded Gauss-Legendre in each ``t``.

    Suited to integrands that are large near the faces of the simplex.
    """
    x, w = graded_gauss_legendre(order, depth)
    t = np.array(list(itertools.product(x, repeat=dim)))
    wt = np.prod(np.array(list(itertools.product(w, repeat=dim))), axis=1)
    powers = np.arange(dim - 1, -1, -1)
    wt = wt * np.prod((1.0 - t) ** powers, axis=1)
    return stick_breaking(t), wt


def dirichlet_integral(powers, slack_power=0.0):
    """Closed form of ``simplex_integrate`` with ``g = 1``."""
    a = np.asarray(powers, dtype=float)
    logv = gammaln(a + 1).sum() + gammaln(slack_power + 1) - gammaln(a.sum() + a.size + slack_power + 1)
    return float(np.exp(logv))

"""Named smooth concave generators with exact derivatives in barycentric coordinates."""

import math

import numpy as np

from .simplex import Analytic


def _with_hess(f, hess):
    f.hess = hess
    return f


def parabola():
    """``p_1 p_2`` on the two-point simplex, i.e. ``q (1 - q)``."""
    return _with_hess(
        Analytic(lambda p: p[..., 0] * p[..., 1], 2, grad=lambda p: p[..., ::-1].copy(), name="parabola"),
        lambda p: np.broadcast_to(np.array([[0.0, 1.0], [1.0, 0.0]]), p.shape + (2,)),
    )


def sine():
    """``sin(pi p_1) / pi`` on the two-point simplex."""

    def grad(p):
        g = np.zeros(p.shape)
        g[..., 0] = np.cos(math.pi * p[..., 0])
        return g

    def hess(p):
        H = np.zeros(p.shape + (2,))
        H[..., 0, 0] = -math.pi * np.sin(math.pi * p[..., 0])
        return H

    return _with_hess(Analytic(lambda p: np.sin(math.pi * p[..., 0]) / math.pi, 2, grad=grad, name="sine"), hess)


def geomean(n):
    """``(p_1 ... p_n) ** (1/n)``."""
    w = 1.0 / n

    def f(p):
        return np.prod(p, axis=-1) ** w

    def grad(p):
        return f(p)[..., None] * w / p

    def hess(p):
        v = f(p)[..., None, None]
        r = w / p
        return v * (r[..., :, None] * r[..., None, :] - np.eye(n) * (w / p ** 2)[..., None, :])

    return _with_hess(Analytic(f, n, grad=grad, name="geomean"), hess)


def harmonic(n):
    """``1 / sum(1 / p_i)``: concave, vanishing on the boundary."""

    def f(p):
        return 1.0 / np.sum(1.0 / p, axis=-1)

    def grad(p):
        return (f(p) ** 2)[..., None] / p ** 2

    def hess(p):
        v = f(p)[..., None, None]
        u = 1.0 / p ** 2
        return 2 * v ** 3 * u[..., :, None] * u[..., None, :] - 2 * v ** 2 * np.eye(n) * (1.0 / p ** 3)[..., None, :]

    return _with_hess(Analytic(f, n, grad=grad, name="harmonic"), hess)


def named(name, n):
    if name == "parabola":
        return parabola()
    if name == "sine":
        return sine()
    if name == "geomean":
        return geomean(n)
    if name == "harmonic":
        return harmonic(n)
    raise ValueError(f"unknown generator {name!r}; choose parabola, sine, geomean or harmonic")


NAMES = ("parabola", "sine", "geomean", "harmonic")

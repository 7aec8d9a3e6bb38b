"""Laws of the random coefficient vector ``C`` and their small-scale limits.

Each model exposes its density ``rho`` (where it has one), the limit
``h(x) = lim rho(kappa x) / kappa**alpha`` as ``kappa -> 0``, and closed-form
integrals of ``h`` over the regions ``R(p, a) = {x > 0 : <p, x> < a}``.
Every ``h`` used here has product form ``gamma * prod x_i ** alpha_i``.
"""

import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from .quadrature import simplex_integrate


class DomainError(ValueError):
    pass


class NotSampleable(TypeError):
    pass


class Unsupported(NotImplementedError):
    pass


@dataclass(frozen=True)
class CoefficientModel:
    """Base class. Subclasses set ``n``, ``alphas`` and ``gamma``."""

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if np.any(self.alphas <= -1):
            raise ValueError("homogeneity exponents must exceed -1")
        if not (self.gamma > 0):
            raise ValueError("intensity constant must be positive")

    @property
    def alpha(self):
        """Order of homogeneity of ``h``."""
        return float(np.sum(self.alphas))

    @property
    def index(self):
        """``n + alpha``; the hardmin scaling is ``K ** (1 / index)``."""
        return self.n + self.alpha

    @property
    def constant_weights(self):
        """``(1 + alpha_i) / (n + alpha)``: exponents of the mean limit function."""
        return (1.0 + self.alphas) / self.index

    def h(self, x):
        x = np.asarray(x, dtype=float)
        return self.gamma * np.prod(x ** self.alphas, axis=-1)

    def density(self, x):
        raise Unsupported(f"{type(self).__name__} has no coefficient density")

    def sample(self, rng, size=None):
        raise NotSampleable(f"{type(self).__name__} only defines an intensity")

    def cgf(self, t):
        raise Unsupported(f"{type(self).__name__} has no cumulant generating function")

    @cached_property
    def M(self):
        """``integral of h over {sum y < 1}`` by Gauss-Jacobi quadrature.

        The quadrature absorbs the ``y_i ** alpha_i`` factors into its weights
        and evaluates ``h / prod y ** alpha`` at the nodes.
        """
        a = self.alphas

        def smooth_part(y):
            return self.h(y) / np.prod(y ** a, axis=-1)

        return simplex_integrate(smooth_part, self.n, order=8, powers=a)

    def intensity_integral_R(self, p, a=1.0):
        """``integral of h over R(p, a)`` = ``M a**(n+alpha) / prod p_i**(1+alpha_i)``."""
        if np.any(np.asarray(a) < 0):
            raise DomainError("level must be non-negative")
        p = np.asarray(p, dtype=float)
        a = np.asarray(a, dtype=float)
        return (self.M * a ** self.index / np.prod(p ** (1.0 + self.alphas), axis=-1))[()]

    def mean_limit(self, p):
        """``E Psi(p) = Gamma(1 + 1/(n+alpha)) * (integral of h over R(p, 1)) ** (-1/(n+alpha))``."""
        return math.gamma(1.0 + 1.0 / self.index) * self.intensity_integral_R(p) ** (-1.0 / self.index)

    def box_mass(self, box):
        """``integral of h over prod [0, box_i]``."""
        b = np.broadcast_to(np.asarray(box, dtype=float), (self.n,))
        return float(self.gamma * np.prod(b ** (1.0 + self.alphas) / (1.0 + self.alphas)))

    def sample_box(self, rng, count, box):
        """``count`` iid points with density proportional to ``h`` on ``prod [0, box_i]``."""
        b = np.broadcast_to(np.asarray(box, dtype=float), (self.n,))
        u = rng.random((int(count), self.n))
        return b * u ** (1.0 / (1.0 + self.alphas))

    def sample_region(self, rng, count, p, a):
        """``count`` iid points with density proportional to ``h`` on ``R(p, a)``."""
        shape = np.append(1.0 + self.alphas, 1.0)
        y = rng.dirichlet(shape, size=int(count))[:, :-1]
        return a * y / np.asarray(p, dtype=float)

    def small_scale_error(self, kappa, x):
        """``max |rho(kappa x) / kappa**alpha - h(x)|`` over the rows of ``x``."""
        x = np.asarray(x, dtype=float)
        return float(np.max(np.abs(self.density(kappa * x) / kappa ** self.alpha - self.h(x))))


@dataclass(frozen=True)
class IidUniform(CoefficientModel):
    """Independent ``U[0, scale]`` coordinates; ``h`` is the density at the origin."""

    n: int = 2
    scale: float = 1.0

    @property
    def alphas(self):
        return np.zeros(self.n)

    @property
    def gamma(self):
        return float(self.scale) ** -self.n

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.all((x >= 0) & (x <= self.scale), axis=-1)
        return np.where(inside, self.gamma, 0.0)

    def sample(self, rng, size=None):
        shape = (self.n,) if size is None else (size, self.n)
        return rng.uniform(0.0, self.scale, shape)

    def cgf(self, t):
        t = _nonpositive(t)
        ts = t * self.scale
        safe = np.where(ts == 0, 1.0, ts)
        return np.sum(np.where(ts == 0, 0.0, np.log(np.expm1(safe) / safe)), axis=-1)[()]


@dataclass(frozen=True)
class IidExponential(CoefficientModel):
    n: int = 2
    rate: float = 1.0

    @property
    def alphas(self):
        return np.zeros(self.n)

    @property
    def gamma(self):
        return float(self.rate) ** self.n

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return self.gamma * np.exp(-self.rate * np.sum(x, axis=-1))

    def sample(self, rng, size=None):
        shape = (self.n,) if size is None else (size, self.n)
        return rng.exponential(1.0 / self.rate, shape)

    def cgf(self, t):
        t = _nonpositive(t)
        return np.sum(np.log(self.rate / (self.rate - t)), axis=-1)[()]


@dataclass(frozen=True)
class IndependentGamma(CoefficientModel):
    """Independent ``Gamma(shape_i, rate_i)``: density ``∝ x**(shape-1) exp(-rate x)``."""

    shapes: tuple = (1.0, 1.0)
    rates: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(float(s) for s in self.shapes))
        rates = self.rates if self.rates is not None else (1.0,) * len(self.shapes)
        object.__setattr__(self, "rates", tuple(float(r) for r in rates))
        if len(self.rates) != len(self.shapes):
            raise ValueError("shapes and rates differ in length")
        if min(self.shapes) <= 0 or min(self.rates) <= 0:
            raise ValueError("shapes and rates must be positive")
        super().__post_init__()

    @property
    def n(self):
        return len(self.shapes)

    @property
    def alphas(self):
        return np.asarray(self.shapes) - 1.0

    @property
    def gamma(self):
        k = np.asarray(self.shapes)
        b = np.asarray(self.rates)
        return float(np.exp(np.sum(k * np.log(b) - gammaln(k))))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return self.h(x) * np.exp(-np.sum(np.asarray(self.rates) * x, axis=-1))

    def sample(self, rng, size=None):
        shape = (self.n,) if size is None else (size, self.n)
        return rng.gamma(np.asarray(self.shapes), 1.0 / np.asarray(self.rates), shape)

    def cgf(self, t):
        t = _nonpositive(t)
        k = np.asarray(self.shapes)
        b = np.asarray(self.rates)
        return np.sum(-k * np.log1p(-t / b), axis=-1)[()]


@dataclass(frozen=True)
class ConstantIntensity(CoefficientModel):
    """Intensity ``h = gamma`` with no underlying law of ``C``; for Poisson constructions."""

    n: int = 2
    gamma: float = 1.0

    @property
    def alphas(self):
        return np.zeros(self.n)


def _nonpositive(t):
    t = np.asarray(t, dtype=float)
    if np.any(t > 0):
        raise DomainError("cumulant generating function is only used on (-inf, 0]^n")
    return t


def intensity_integral_mc(h, p, a, rng, n_points=10 ** 6):
    """Monte Carlo ``integral of h over R(p, a)`` for an arbitrary intensity callable.

    Uniform points in the box ``[0, a / min p]^n`` in antithetic pairs.
    Returns ``(estimate, standard_error)``.
    """
    if a < 0:
        raise DomainError("level must be non-negative")
    p = np.asarray(p, dtype=float)
    if a == 0:
        return 0.0, 0.0
    side = a / p.min()
    half = max(1, n_points // 2)
    u = rng.random((half, p.size))
    vol = side ** p.size
    vals = []
    for x in (side * u, side * (1.0 - u)):
        vals.append(np.where(x @ p < a, h(x), 0.0))
    pair_mean = 0.5 * (vals[0] + vals[1])
    return float(vol * pair_mean.mean()), float(vol * pair_mean.std(ddof=1) / math.sqrt(half))


_PARAM = re.compile(r"(\w+)\s*=\s*(\[[^\]]*\]|[^,]+)")


def parse_model(spec, n=2):
    """Build a model from ``kind:key=value,...``.

    Kinds: ``uniform:scale=``, ``exponential:rate=``, ``constant-h:gamma=``,
    ``gamma:shapes=[..],scales=[..]`` (or ``rates=[..]``). Gamma ``scales``
    are the usual scale parameters, i.e. reciprocal rates.
    """
    kind, _, rest = spec.partition(":")
    params = {k: json.loads(v) for k, v in _PARAM.findall(rest)}
    kind = kind.strip().lower()
    if kind == "uniform":
        return IidUniform(n=n, scale=float(params.get("scale", 1.0)))
    if kind == "exponential":
        return IidExponential(n=n, rate=float(params.get("rate", 1.0)))
    if kind in ("constant-h", "constant"):
        return ConstantIntensity(n=n, gamma=float(params.get("gamma", 1.0)))
    if kind == "gamma":
        shapes = params.get("shapes")
        if shapes is None:
            raise ValueError("gamma model needs shapes=[...]")
        if "rates" in params:
            rates = params["rates"]
        elif "scales" in params:
            rates = [1.0 / s for s in params["scales"]]
        else:
            rates = None
        return IndependentGamma(shapes=tuple(shapes), rates=None if rates is None else tuple(rates))
    raise ValueError(f"unknown model kind {kind!r}")

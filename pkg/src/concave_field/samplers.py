"""Random concave functions built from random hyperplanes.

Four regimes: softmin with fixed ``lam``, scaled hardmin, the Poisson
point-process description of the hardmin limit, and softmin with ``lam``
growing together with ``K``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .models import DomainError
from .simplex import CompactSlice, EmptyEnsemble, PolyhedralMin, SoftminEnsemble


class TruncationFailure(RuntimeError):
    pass


def sample_softmin_fixed_lambda(model, K, lam, rng):
    if K < 1:
        raise ValueError("K must be >= 1")
    if not (0 < lam < math.inf):
        raise ValueError("lam must be finite and positive")
    return SoftminEnsemble(model.sample(rng, K), lam)


def eval_deterministic_limit(model, lam, p):
    """``-(1/lam) * cgf(-lam p)``, the almost-sure limit of the fixed-``lam`` softmin."""
    if not (0 < lam < math.inf):
        raise ValueError("lam must be finite and positive")
    return -model.cgf(-lam * np.asarray(p, dtype=float)) / lam


def hardmin_scale(model, K):
    """``K ** (1 / (n + alpha))``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return float(K) ** (1.0 / model.index)


def sample_hardmin_scaled(model, K, rng):
    return PolyhedralMin(hardmin_scale(model, K) * model.sample(rng, K))


def hardmin_values(model, K, points, rng):
    """Values of one scaled hardmin sample at the rows of ``points``.

    Same law as ``sample_hardmin_scaled(...)(points)`` without keeping the planes.
    """
    x = model.sample(rng, K)
    return hardmin_scale(model, K) * np.min(np.asarray(points, dtype=float) @ x.T, axis=-1)


def sample_poisson_points(model, box, rng):
    """Poisson process with intensity ``h dx`` restricted to ``[0, box]^n``."""
    count = rng.poisson(model.box_mass(box))
    return model.sample_box(rng, count, box)


class PoissonEnvelope(PolyhedralMin):
    """``p -> min <p, x>`` over a truncated Poisson realisation.

    ``box`` is the truncation bound and ``certified`` the slice (or points) on
    which the truncation provably does not change the value.
    """

    def __init__(self, points, box, certified, model):
        super().__init__(points)
        self.points = self.planes
        self.box = box
        self.certified = certified
        self.model = model


def _certified(points, box, target):
    if points.shape[0] == 0:
        return False
    if isinstance(target, CompactSlice):
        # on the slice <p, x> <= max over the slice vertices, which bounds the envelope sup
        sup_bound = np.min(np.max(target.vertices() @ points.T, axis=0))
        return box * target.floor >= sup_bound
    env = np.min(target @ points.T, axis=-1)
    return bool(np.all(box * target.min(axis=-1) >= env))


def sample_poisson_envelope(model, target, rng, box=None, max_box=1e8):
    """Envelope of a Poisson process with intensity ``h``, exact on ``target``.

    ``target`` is a ``CompactSlice`` or an array of interior points. Any point
    outside ``[0, box]^n`` has ``<p, x> >= box * min p``; the box doubles
    until that bound clears the envelope on the target. Points from the
    enlarged box are added only outside the old box, so earlier points are kept.
    """
    if not isinstance(target, CompactSlice):
        target = np.atleast_2d(np.asarray(target, dtype=float))
        if np.any(target <= 0):
            raise DomainError("certification needs interior points")
    if box is None:
        # expected number of points about 2n
        box = (2.0 * model.n / model.box_mass(1.0)) ** (1.0 / model.index)
    pts = sample_poisson_points(model, box, rng)
    while not _certified(pts, box, target):
        if 2 * box > max_box:
            raise TruncationFailure(
                f"envelope not certified with box {box:.3g} ({pts.shape[0]} points)"
            )
        bigger = sample_poisson_points(model, 2 * box, rng)
        outside = np.any(bigger > box, axis=1)
        pts = np.concatenate([pts, bigger[outside]])
        box *= 2
    return PoissonEnvelope(pts, box, target, model)


REGIMES = ("superlog", "logshift", "linear")


@dataclass(frozen=True)
class DiagonalSpec:
    """Softmin with ``lam_K`` tied to ``K``.

    ``superlog``: ``lam = a (log K)^2``; ``logshift``: ``lam = c a log K``;
    ``linear``: ``lam = c a``; here ``a = K ** (1 / (n + alpha))``.
    """

    model: object
    K: int
    regime: str = "logshift"
    c: float = 1.0

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        if self.K < 3:
            raise DomainError("K must be >= 3")
        if not (self.c > 0):
            raise ValueError("c must be positive")

    @property
    def scale(self):
        return hardmin_scale(self.model, self.K)

    @property
    def lam(self):
        a, logk = self.scale, math.log(self.K)
        if self.regime == "superlog":
            return a * logk ** 2
        if self.regime == "logshift":
            return self.c * a * logk
        return self.c * a

    @property
    def offset(self):
        """``-a log K / lam``; the limit of ``raw`` in the logshift regime is hardmin plus ``1/c``."""
        return -self.scale * math.log(self.K) / self.lam


def sample_diagonal(spec, rng):
    """``a * softmin_lam(<p, C_k>)`` with offset ``-a log K / lam``.

    Calling the result gives the normalised value
    ``-(1/c_K) log sum exp(-c_K <p, a C_k>)`` with ``c_K = lam / a``;
    ``.raw`` gives the value without the offset.
    """
    return SoftminEnsemble(spec.model.sample(rng, spec.K), spec.lam, scale=spec.scale, offset=spec.offset)


@dataclass
class PsiTilde:
    value: float
    tail_mass: float
    kept_mass: float


def eval_psi_tilde(envelope, c, p):
    """``-(1/c) log sum_x exp(-c <p, x>)`` over the envelope points.

    ``tail_mass`` is the expected contribution to the sum from points outside
    the truncation box, in closed form for product intensities.
    """
    if not (c > 0):
        raise ValueError("c must be positive")
    pts = np.asarray(envelope.points if hasattr(envelope, "points") else envelope, dtype=float)
    if pts.size == 0:
        raise EmptyEnsemble("no points")
    p = np.asarray(p, dtype=float)
    v = c * (pts @ p)
    vmin = v.min()
    s = np.sum(np.exp(-(v - vmin)))
    value = (vmin - math.log(s)) / c
    tail = math.nan
    model = getattr(envelope, "model", None)
    if model is not None:
        shapes = 1.0 + model.alphas
        full = model.gamma * np.prod(np.exp(_lgamma(shapes)) / (c * p) ** shapes)
        inside = np.prod(gammainc(shapes, c * p * envelope.box))
        tail = float(full * (1.0 - inside))
    return PsiTilde(float(value), tail, float(s * math.exp(-vmin)))


def _lgamma(x):
    return np.array([math.lgamma(v) for v in np.atleast_1d(x)])

"""Softmin (smooth minimum) with explicit hardmin at ``lam = inf``."""

import math

import numpy as np


class EmptyInput(ValueError):
    pass


def _check_lambda(lam):
    lam = np.asarray(lam, dtype=float)
    if not np.all(lam > 0):
        raise ValueError(f"softmin parameter must be positive or inf, got {lam!r}")
    if lam.ndim and not np.all(np.isfinite(lam)):
        raise ValueError("an array of softmin parameters must be finite")
    return lam


def _lam_along(lam, axis):
    return np.expand_dims(lam, axis) if lam.ndim else lam


def softmin(values, lam, axis=-1):
    """Return ``-(1/lam) * log(mean(exp(-lam * values)))`` along ``axis``.

    ``lam = math.inf`` gives the exact minimum. An array ``lam`` gives one
    parameter per list. The exponentials are shifted by the minimum, so large
    ``lam * (max - min)`` does not overflow.
    """
    lam = _check_lambda(lam)
    v = np.asarray(values, dtype=float)
    if v.size == 0 or v.shape[axis] == 0:
        raise EmptyInput("softmin of an empty list")
    vmin = np.min(v, axis=axis, keepdims=True)
    if np.isinf(lam).any():
        return np.squeeze(vmin, axis=axis)[()]
    k = v.shape[axis]
    lam = _lam_along(lam, axis)
    s = np.sum(np.exp(-lam * (v - vmin)), axis=axis, keepdims=True)
    out = vmin - (np.log(s) - math.log(k)) / lam
    return np.squeeze(out, axis=axis)[()]


def softmin_weights(values, lam, axis=-1):
    """Gradient of the softmin with respect to ``values`` (a softmax of ``-lam*values``).

    At ``lam = inf`` the weight sits on the first minimiser.
    """
    lam = _check_lambda(lam)
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise EmptyInput("softmin of an empty list")
    if np.isinf(lam).any():
        idx = np.argmin(v, axis=axis)
        w = np.zeros_like(v)
        np.put_along_axis(w, np.expand_dims(idx, axis), 1.0, axis=axis)
        return w
    e = np.exp(-_lam_along(lam, axis) * (v - np.min(v, axis=axis, keepdims=True)))
    return e / np.sum(e, axis=axis, keepdims=True)


def softmin_bounds_check(values, lam, tol=1e-12):
    """Check ``min <= softmin <= min + log(K)/lam``; returns ``(lower_ok, upper_ok)``."""
    v = np.asarray(values, dtype=float)
    if math.isinf(lam):
        raise ValueError("bounds check needs a finite lam")
    m = softmin(v, lam)
    lo = float(np.min(v))
    return bool(m >= lo - tol), bool(m <= lo + math.log(v.size) / lam + tol)


def softmin_shift_check(values, lam, c, tol=1e-12):
    """Translation equivariance: ``softmin(v + c) == softmin(v) + c``."""
    v = np.asarray(values, dtype=float)
    lhs = softmin(v + c, lam)
    rhs = softmin(v, lam) + c
    return bool(abs(lhs - rhs) <= tol * max(1.0, abs(rhs)))

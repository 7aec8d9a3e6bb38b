"""Small dense linear programs by the tableau simplex method with Bland's rule."""

import numpy as np


class NumericalFailure(RuntimeError):
    pass


class Unbounded(ValueError):
    pass


def simplex_max(c, A, b, max_iter=10_000, tol=1e-12):
    """Maximise ``c.y`` subject to ``A y <= b``, ``y >= 0``, for ``b >= 0``.

    The origin is feasible, so a single phase suffices. Returns
    ``(value, y, duals)`` where ``duals`` solves the dual problem
    ``min b.x`` subject to ``A^T x >= c``, ``x >= 0``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, k = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be non-negative")
    T = np.zeros((m + 1, k + m + 1))
    T[:m, :k] = A
    T[:m, k:k + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :k] = -c
    basis = list(range(k, k + m))
    for _ in range(max_iter):
        entering = np.flatnonzero(T[m, :-1] < -tol)
        if entering.size == 0:
            break
        j = entering[0]
        col = T[:m, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            raise Unbounded("objective unbounded above")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol]
        i = min(ties, key=lambda r: basis[r])
        T[i] /= T[i, j]
        others = np.arange(m + 1) != i
        T[others] -= np.outer(T[others, j], T[i])
        basis[i] = j
    else:
        raise NumericalFailure("simplex iteration cap reached")
    y = np.zeros(k + m)
    y[basis] = T[:m, -1]
    return float(T[m, -1]), y[:k], T[m, k:k + m].copy()

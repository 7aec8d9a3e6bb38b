# Random concave functions from many random hyperplanes.
#
# Draw K coefficient vectors C_k with iid Exp(1) coordinates and take the
# softmin of the linear functions p -> <p, C_k> on the simplex. With lam
# fixed and K growing, the result settles on a deterministic function given
# by the cumulant generating function of C.

import numpy as np

from concave_field import IidExponential, eval_deterministic_limit, replica_rng, sample_softmin_fixed_lambda
from concave_field.simplex import simplex_lattice

model = IidExponential(n=2, rate=1.0)
lam = 10.0
grid = simplex_lattice(2, 8)
limit = eval_deterministic_limit(model, lam, grid)

# The limit at the barycenter is 0.2 * log 6.
print("limit at (1/2, 1/2):", eval_deterministic_limit(model, lam, np.array([0.5, 0.5])))

# Sup distance to the limit over the grid shrinks roughly like 1/sqrt(K).
for K in (10, 100, 1000, 10000, 100000):
    f = sample_softmin_fixed_lambda(model, K, lam, replica_rng(1))
    print(f"K={K:>6d}  sup error {np.max(np.abs(f(grid) - limit)):.5f}")

# For large lam the limit, normalised by its value at the barycenter,
# flattens towards 1 inside the simplex, but only logarithmically in lam.
interior = grid[1:-1]
for big in (1e2, 1e4, 1e8):
    ratio = eval_deterministic_limit(model, big, interior) / eval_deterministic_limit(model, big, np.array([0.5, 0.5]))
    print(f"lam={big:.0e}  normalised limit on the grid: {np.round(ratio, 3)}")

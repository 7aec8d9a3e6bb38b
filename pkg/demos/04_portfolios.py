# Portfolios generated by random concave functions.
#
# A positive concave Phi on the simplex generates portfolio weights
# pi_i = p_i (1 + d_i - <d, p>) with d the gradient of log Phi. Geometric
# means give constant weights. For the limit law the weights at p are
# Y = p * Z / <p, Z> with Z the Poisson point attaining the minimum.

import numpy as np

from concave_field import (
    IndependentGamma,
    dirichlet_transport,
    expected_limit_function,
    fgp_map,
    geometric_mean,
    map_replicas,
    portfolio_weight_sample,
)

p = np.array([0.3, 0.7])
print("geometric mean (0.2, 0.8) at p:", fgp_map(geometric_mean([0.2, 0.8]), p))
print("identity transport of the symmetric geometric mean:", dirichlet_transport(geometric_mean([0.5, 0.5]), p))

# Gamma(2) and Gamma(1) coordinates: the mean limit function is a geometric
# mean with exponents (2/3, 1/3), so its portfolio is constant.
model = IndependentGamma(shapes=(2.0, 1.0))
mean_fn = expected_limit_function(model)
print("portfolio of the mean limit:", fgp_map(mean_fn, p))

w = map_replicas(lambda g: portfolio_weight_sample(model, p, g), 5000, seed=2)
print("average sampled weights:", w.mean(axis=0))
hist, _ = np.histogram(w[:, 0], bins=5, range=(0, 1), density=True)
print("histogram of the first weight (density 2y):", np.round(hist, 2))

# The hardmin scaling limit and its Poisson description.
#
# With uniform coefficients on [0, 1]^2, the minimum of K planes multiplied
# by sqrt(K) has a limit law. At a point p its square is exponential with
# rate equal to the area of {x > 0 : <p, x> < 1}. The same law comes from a
# unit-intensity Poisson process N in the quadrant, via p -> min <p, x>.

import math

import numpy as np

from concave_field import ConstantIntensity, IidUniform, map_replicas, sample_poisson_envelope
from concave_field.samplers import hardmin_values
from concave_field.stats import ks_test_exponential, two_sample_ks

uniform = IidUniform(n=2)
unit = ConstantIntensity(n=2)
e = np.array([0.5, 0.5])

hard = map_replicas(lambda g: hardmin_values(uniform, 10 ** 4, e, g), 5000, seed=3)
pois = map_replicas(lambda g: sample_poisson_envelope(unit, e[None], g)(e), 5000, seed=4)

print("rate of the exponential law:", uniform.intensity_integral_R(e))
print(ks_test_exponential(hard ** 2, 2.0, "hardmin squared vs Exp(2)").line())
print(two_sample_ks(hard, pois, "hardmin vs Poisson envelope").line())
print("mean", hard.mean(), "closed form", math.gamma(1.5) / math.sqrt(2))

# Near the boundary the limit function vanishes like a power of the distance.
for eps in (0.1, 0.01, 0.001):
    c = np.array([eps, 1 - eps])
    vals = map_replicas(lambda g: sample_poisson_envelope(unit, c[None], g)(c), 2000, seed=5)
    print(f"eps={eps:<6} mean value {vals.mean():.4f}")

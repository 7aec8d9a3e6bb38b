# Tail probabilities of the limit law and volumes of dual regions.
#
# For a concave psi, the probability that the limit dominates psi is
# exp(-area of R-hat(psi)), where R-hat(psi) collects the coefficient vectors
# x with <p, x> < psi(p) for some p. For smooth psi vanishing on the boundary
# that area is an integral of psi times the determinant of its negative Hessian.

import math

import numpy as np

from concave_field import ConstantIntensity, RegionSpec, finite_dim_tail, replica_rng, tail_probability
from concave_field.generators import geomean, parabola, sine
from concave_field.stokes import C2Generator, stokes_volume, stokes_volume_1d

unit = ConstantIntensity(n=2)

# Two constraints psi(p_i) >= a_i: the union of two triangles.
spec = RegionSpec(np.array([[0.5, 0.5], [0.2, 0.8]]), np.array([0.5, 0.4]))
print("P(value at both points exceeds the levels):", finite_dim_tail(unit, spec))

for f in (parabola(), sine()):
    gen = C2Generator.from_simplex(f, hess=f.hess)
    vol = stokes_volume(gen)
    mc = tail_probability(unit, f, 200_000, replica_rng(1))
    print(f"{f.name}: volume {vol.value:.6f}  one-dimensional {stokes_volume_1d(gen):.6f}"
          f"  Monte Carlo {mc.integral:.4f} +- {mc.integral_stderr:.4f}")

# The geometric mean has an unbounded dual region, so the tail is zero.
g = geomean(2)
print("geometric mean:", stokes_volume(C2Generator.from_simplex(g, hess=g.hess)))
print("tail of the geometric mean:", tail_probability(unit, g).estimate, "vs exp(-inf) =", math.exp(-math.inf))

"""
Simple quasi-concave functions
==============================

Nested level-set stacks, their lattice operations and dyadic approximation.
"""

import numpy as np

from qcval import geometry as geo
from qcval.qcf import cone_oracle, dyadic_approx, indicator, lattice_max, lattice_min, make_simple

# A stack lists (threshold, body) pairs with bodies shrinking as t grows.
f = make_simple([(1, geo.Box([0, 0], [2, 2])), (2, geo.Box([0, 0], [1, 1]))])
print(f, f([0.5, 0.5]), f([1.5, 1.5]), f([5, 5]))

# The pointwise min of two box stacks is always a stack.  The max is one only
# when every level-set union stays convex.
g = indicator(geo.Box([1, 0], [3, 2]))
print("f ^ g:", lattice_min(f, g))
print("1_A v g:", lattice_max(indicator(geo.Box([0, 0], [2, 2])), g))

# A general quasi-concave function is known through its level sets.  Sampling
# them on a dyadic grid gives simple functions that increase towards it.
cone = cone_oracle(geo.unit_cube(2))
x = np.array([0.3, 0.1])
for depth in range(1, 6):
    print(depth, dyadic_approx(cone, depth)(x), "->", cone.value(x))

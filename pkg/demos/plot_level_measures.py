"""
Level-set measures and integral valuations
==========================================

The measure S_k(f; .) is atomic at the thresholds of a simple function.
"""

from qcval import geometry as geo
from qcval.measures import Hinge, bump, distributional_check, integrate, level_measure
from qcval.qcf import make_simple
from qcval.valuations import DensitySpec, integral_valuation

f = make_simple([(1, geo.Box([0, 0], [2, 2])), (2, geo.Box([0, 0], [1, 1]))])
for k in range(3):
    print(f"S_{k}:", level_measure(f, k).atoms)

# The atoms are the negative jumps of t -> V_k(L_t f).  Against a smooth test
# function the two sides of the distributional identity agree.
print("residual:", distributional_check(f, 2, bump(0.5, 2.5)))

# An integral valuation pairs each S_k with a density vanishing near 0.
mu = integral_valuation(DensitySpec.single(2, 2, Hinge(0.5), 0.5))
print("mu(f) =", mu(f), "=", integrate(level_measure(f, 2), Hinge(0.5)))

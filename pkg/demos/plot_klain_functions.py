"""
Klain functions
===============

Evaluate a degree-1 valuation on bodies inside lines through the origin.
"""

from qcval.analysis import grassmannian_frames, klain_eval, klain_reconstruct_check
from qcval.measures import Hinge
from qcval.valuations import DensitySpec, integral_valuation

mu = integral_valuation(DensitySpec.single(2, 1, Hinge(0.25), 0.25))
frames = grassmannian_frames(2, 1, n_random=3, seed=0)

# For a rotation-invariant valuation the value does not depend on the line.
for t in (0.5, 1.5, 3.0):
    print(t, [round(klain_eval(mu, t, fr).value, 12) for fr in frames])

# One Klain function, sampled on a grid, rebuilds the valuation on stacks
# whose thresholds lie on that grid.
rep = klain_reconstruct_check(mu, (0.25, 0.5, 1.0, 1.5, 2.0, 3.0), frames)
print("deviation:", rep.deviation, "spread:", rep.max_spread())

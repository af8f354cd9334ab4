"""
Intrinsic volumes of boxes and zonotopes
========================================

Exact intrinsic volumes next to a Monte-Carlo fit of the parallel-body volume.
"""

import numpy as np

from qcval import geometry as geo

# A box has intrinsic volumes equal to the elementary symmetric polynomials
# of its side lengths.
box = geo.Box([0, 0, 0], [1, 2, 0.5])
print("box V_k:", geo.intrinsic_volumes(box))

# A zonotope sums |det| over subsets of its generators.  Three unit generators
# at 60 degrees give a regular hexagon with perimeter 6.
gens = [[np.cos(a), np.sin(a)] for a in (0, np.pi / 3, 2 * np.pi / 3)]
hexagon = geo.Zonotope([0, 0], gens)
print("hexagon V_k:", geo.intrinsic_volumes(hexagon))

# Sample the padded bounding box, measure distances to the body and fit the
# polynomial in r.  Standard errors come from the binomial counts.
radii = np.linspace(0.1, 1.0, 10)
est = geo.steiner_mc_volumes(hexagon, radii, samples=10 ** 6, seed=0)
for k, (v, e, s) in enumerate(zip(geo.intrinsic_volumes(hexagon), est.values, est.stderr)):
    print(f"V_{k}: exact {v:.5f}  fit {e:.5f} +- {s:.5f}")

"""
Homogeneous decomposition
=========================

Split a valuation into parts of degree 0..N from N + 1 dilations.
"""

import numpy as np

from qcval.analysis import vandermonde_coeffs, verify_decomposition
from qcval.generators import random_box_stack
from qcval.measures import Hinge, Poly
from qcval.valuations import DensitySpec, integral_valuation, max_type_valuation

# The weights come from the exact rational inverse of a Vandermonde matrix.
print(vandermonde_coeffs(2).exact)

# Mix a max-type term with integral terms of degrees 1 and 2.
mu = (max_type_valuation(Poly((0, 0, 1)), 2)
      + integral_valuation(DensitySpec.single(2, 1, Hinge(0.25), 0.25))
      + integral_valuation(DensitySpec.single(2, 2, Hinge(0.25), 0.25)))

f = random_box_stack(np.random.default_rng(1), 2)
rep = verify_decomposition(mu, f, lambdas=(0.5, 3.0, 7.25))
print("components:", rep.components, "sum residual:", rep.residual_sum)
print("worst homogeneity residual:", rep.max_homog_residual())

"""Valuations on quasi-concave functions, computed on boxes and zonotopes."""
from .geometry import (Box, EmbeddedBody, Frame, Zonotope, box_intersect, box_intrinsic_volumes,
                       box_union_if_convex, embed, hausdorff_distance, intrinsic_volumes,
                       steiner_mc_volumes, support_value, transform_body,
                       zonotope_intrinsic_volume)
from .qcf import (NotQuasiConcaveError, QCFOracle, SimpleQCF, cone_oracle, dyadic_approx,
                  evaluate, indicator, lattice_max, lattice_min, level_set, make_simple,
                  transform_qcf)
from .measures import (DiscreteMeasure, Hinge, LevelProfile, PiecewiseLinear, Poly,
                       cone_reference_measure, distributional_check, integrate, level_measure,
                       level_profile)
from .valuations import (DensitySpec, MonotoneSpec, ValuationOracle, check_invariance,
                         check_valuation_identity, eval_integral, eval_max_type, eval_monotone,
                         integral_valuation, max_type_valuation, monotone_valuation)
from .analysis import (homogeneous_component, homogeneous_components, klain_eval,
                       klain_reconstruct_check, recover_density, vandermonde_coeffs,
                       verify_decomposition)

__all__ = [
    "Box", "EmbeddedBody", "Frame", "Zonotope", "box_intersect", "box_intrinsic_volumes",
    "box_union_if_convex", "embed", "hausdorff_distance", "intrinsic_volumes",
    "steiner_mc_volumes", "support_value", "transform_body", "zonotope_intrinsic_volume",
    "NotQuasiConcaveError", "QCFOracle", "SimpleQCF", "cone_oracle", "dyadic_approx",
    "evaluate", "indicator", "lattice_max", "lattice_min", "level_set", "make_simple",
    "transform_qcf", "DiscreteMeasure", "Hinge", "LevelProfile", "PiecewiseLinear", "Poly",
    "cone_reference_measure", "distributional_check", "integrate", "level_measure",
    "level_profile", "DensitySpec", "MonotoneSpec", "ValuationOracle", "check_invariance",
    "check_valuation_identity", "eval_integral", "eval_max_type", "eval_monotone",
    "integral_valuation", "max_type_valuation", "monotone_valuation", "homogeneous_component",
    "homogeneous_components", "klain_eval", "klain_reconstruct_check", "recover_density",
    "vandermonde_coeffs", "verify_decomposition",
]

__version__ = "0.1.0"

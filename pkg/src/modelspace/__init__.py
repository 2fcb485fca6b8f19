"""Numerical toolkit for dominating (sampling) sets in model spaces of
meromorphic inner functions: coverings adapted to sublevel-set distances,
relative-density diagnostics, the Volberg functional, and empirical
verification of the Bernstein, Remez, and domination inequalities."""

from .covering import (Covering, amplify, build_covering, build_reference_set,
                       defining_integrals, min_subdivision_count, subdivide)
from .errors import ToolkitError
from .geometry import (DistanceProfile, SublevelDistance, SublevelQuery,
                       comparability_report, dist_to_spectrum, dist_to_sublevel,
                       in_sublevel)
from .harmonic import (EdgeMeasure, UpperHalfPlaneGrid, harmonic_measure,
                       harmonic_measure_floor, mu_window_ratio,
                       reverse_condition_inf, volberg_inf)
from .inner import InnerFunction, ZeroSet, blaschke_factor, blaschke_sum
from .sampling import (BoundReport, FamilySpec, SamplingEstimate, c_p_constant,
                       density_probe, empirical_sampling_constant, fit_growth,
                       kernel_node_family, theoretical_bounds)
from .sets import (DensityReport, MeasurableSet, intersect_measure, is_dense,
                   max_gamma, normalize, periodic_set)
from .spaces import (QuadratureSpec, RemezReport, TestFunction, bernstein_ratio,
                     derivative_via_kernel, inner_product_kernel, kernel_eval,
                     kernel_norm_sq, lp_norm, remez_check)

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "Covering", "DensityReport", "DistanceProfile", "EdgeMeasure",
    "FamilySpec", "InnerFunction", "MeasurableSet", "QuadratureSpec", "RemezReport",
    "SamplingEstimate", "SublevelDistance", "SublevelQuery", "TestFunction",
    "ToolkitError", "UpperHalfPlaneGrid", "ZeroSet", "amplify", "bernstein_ratio",
    "blaschke_factor", "blaschke_sum", "build_covering", "build_reference_set",
    "c_p_constant", "comparability_report", "defining_integrals", "density_probe",
    "derivative_via_kernel", "dist_to_spectrum", "dist_to_sublevel",
    "empirical_sampling_constant", "fit_growth", "harmonic_measure",
    "harmonic_measure_floor", "in_sublevel", "inner_product_kernel",
    "intersect_measure", "is_dense", "kernel_eval", "kernel_node_family",
    "kernel_norm_sq", "lp_norm", "max_gamma", "min_subdivision_count", "mu_window_ratio",
    "normalize", "periodic_set", "remez_check", "reverse_condition_inf", "subdivide",
    "theoretical_bounds", "volberg_inf",
]

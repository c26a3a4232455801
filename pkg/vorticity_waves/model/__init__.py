"""
Water-wave model package
"""
from .bifurcation import (
    BifurcationCoefficients,
    bifurcation_coefficients,
    bifurcation_G,
    bifurcation_parameter,
    closed_form_coefficients,
    laminar_kernel,
    mode_one_multiplier,
    second_variation,
    second_variation_field,
)
from .parameters import (
    A_CRIT,
    A_MAX,
    ModelConstants,
    constants_of,
    derive_parameters,
    exact_solution,
    exact_surface,
    laminar,
    laminar_level,
    laminar_multipliers,
    laminar_trace,
)
from .residual import (
    POLYNOMIAL,
    RATIONAL,
    jacobian,
    parameter_derivative,
    project,
    residual,
    residual_vector,
    sup_norm,
    surface_terms,
)
from .solution import Solution

__all__ = [
    'A_CRIT',
    'A_MAX',
    'BifurcationCoefficients',
    'ModelConstants',
    'POLYNOMIAL',
    'RATIONAL',
    'Solution',
    'bifurcation_coefficients',
    'bifurcation_G',
    'bifurcation_parameter',
    'closed_form_coefficients',
    'constants_of',
    'derive_parameters',
    'exact_solution',
    'exact_surface',
    'jacobian',
    'laminar',
    'laminar_kernel',
    'laminar_level',
    'laminar_multipliers',
    'laminar_trace',
    'mode_one_multiplier',
    'parameter_derivative',
    'project',
    'residual',
    'residual_vector',
    'second_variation',
    'second_variation_field',
    'sup_norm',
    'surface_terms',
]

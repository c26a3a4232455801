"""
Surface geometry package
"""
from .intersection import GapResult, find_crossings, self_gap, shoelace_area
from .profile import (
    SurfaceCurve,
    assess_solution,
    breaking_derivatives,
    classify,
    depth_and_validity,
    min_x_slope,
    profile_report,
    solution_curve,
    surface_curve,
)

__all__ = [
    'GapResult',
    'SurfaceCurve',
    'assess_solution',
    'breaking_derivatives',
    'classify',
    'depth_and_validity',
    'find_crossings',
    'min_x_slope',
    'profile_report',
    'self_gap',
    'shoelace_area',
    'solution_curve',
    'surface_curve',
]

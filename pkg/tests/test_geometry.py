import math

import numpy as np
import pytest

from vorticity_waves.geometry.intersection import find_crossings, self_gap, shoelace_area
from vorticity_waves.geometry.profile import (
    assess_solution,
    breaking_derivatives,
    min_x_slope,
    profile_report,
    surface_curve,
)
from vorticity_waves.model.parameters import A_CRIT, A_MAX, exact_solution, exact_surface, laminar_trace
from vorticity_waves.models.schemas import Params, WaveClass
from vorticity_waves.spectral.trace import node_angles


def test_shoelace_area_of_unit_square():
    assert shoelace_area(np.array([0.0, 1.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0, 1.0])) == pytest.approx(1.0)


def test_flat_line_has_no_self_approach():
    alphas = node_angles(256)
    result = self_gap(alphas, alphas.copy(), np.zeros(256), np.ones(256), guard_band=0.5)
    assert not result.crosses
    assert result.gap > 0.45


def test_surface_curve_matches_closed_form_profile():
    a = 0.1
    curve = surface_curve(exact_solution(a, 64))
    x, y = exact_surface(a, curve.alphas)
    assert np.allclose(curve.xs, x, atol=1e-12)
    assert np.allclose(curve.ys, y, atol=1e-12)
    px, py = curve.point(0.3)
    ex, ey = exact_surface(a, np.array([0.3]))
    assert px == pytest.approx(ex[0], abs=1e-12)
    assert py == pytest.approx(ey[0], abs=1e-12)


def test_laminar_trace_is_classified_laminar(exact_point):
    assert exact_point(0.0, 8).wave_class == WaveClass.LAMINAR


@pytest.mark.parametrize("a, expected", [
    (0.05, WaveClass.REGULAR),
    (0.15, WaveClass.REGULAR),
    (0.19, WaveClass.OVERHANGING),
    (0.30, WaveClass.INVALID),
])
def test_exact_family_classes(exact_point, a, expected):
    assert exact_point(a).wave_class == expected


def test_breaking_profile_has_vertical_tangent(exact_point):
    s = exact_point(A_CRIT)
    slope, where = min_x_slope(surface_curve(s.trace))
    assert abs(slope) < 1e-8
    assert 0.0 < where < math.pi
    assert s.wave_class == WaveClass.BREAKING
    derivatives = breaking_derivatives(surface_curve(s.trace), where, 3)
    assert abs(derivatives[0]) < 1e-8
    # x_alpha has a minimum there, so x_alpha_alpha vanishes as well
    assert abs(derivatives[1]) < 1e-5


def test_overhanging_profile_is_injective(exact_point):
    s = exact_point(0.19)
    assert s.diagnostics["min_x_slope"] < 0.0
    assert s.profile.injective
    assert s.profile.alpha_crit is not None
    assert s.diagnostics["self_gap"] > 1e-3


def test_self_intersecting_profile_reports_bubble(exact_point):
    s = exact_point(0.30)
    assert not s.profile.injective
    assert s.profile.self_gap == 0.0
    assert s.profile.bubble_area > 0.0
    curve = surface_curve(s.trace)
    assert find_crossings(curve.alphas, curve.xs, curve.ys, curve.z_slope_moduli, 0.5)


def test_self_gap_shrinks_towards_touching(exact_point):
    gaps = [exact_point(a).diagnostics["self_gap"] for a in (0.19, 0.20, A_MAX - 2e-3)]
    assert gaps[0] > gaps[1] > gaps[2] > 0.0


def test_finite_depth_report():
    p = Params(G=0.1, a=0.05, l=0.5)
    t = laminar_trace(p, 8)
    report = profile_report(t, p)
    assert report.depth_H == pytest.approx(4.0 - t.coeffs[0])
    assert report.wave_class == WaveClass.LAMINAR
    assert report.alpha_crit is None


def test_assess_solution_records_diagnostics(exact_point):
    s = exact_point(0.1)
    assert s.residual_norm < 1e-12
    assert s.diagnostics["depth_H"] == math.inf
    assert s.diagnostics["stagnation_warning"] == 0.0
    assert s.amplitude == pytest.approx(-4.0 * math.sqrt(0.1))
    assert s.a == 0.1
    merged = assess_solution(s.trace, s.params, diagnostics={"iterations": 3.0})
    assert merged.diagnostics["iterations"] == 3.0

import math

import numpy as np
import pytest

from vorticity_waves.errors import (
    DifferentiationError,
    DivergentSeriesError,
    NoLaminarError,
    OutsideUError,
    ParameterError,
    SingularParameterError,
    WaveSolverError,
)
from vorticity_waves.model.bifurcation import (
    bifurcation_coefficients,
    bifurcation_G,
    bifurcation_parameter,
    closed_form_coefficients,
    laminar_kernel,
    mode_one_multiplier,
    second_variation,
    second_variation_field,
)
from vorticity_waves.model.parameters import (
    A_CRIT,
    A_MAX,
    constants_of,
    derive_parameters,
    exact_solution,
    exact_surface,
    laminar,
    laminar_level,
    laminar_multipliers,
    laminar_trace,
)
from vorticity_waves.model.residual import (
    RATIONAL,
    jacobian,
    parameter_derivative,
    residual,
    residual_vector,
    sup_norm,
    surface_terms,
)
from vorticity_waves.models.schemas import GeneralParams, Params
from vorticity_waves.spectral.trace import HoloTrace, node_angles
from vorticity_waves.spectral.transforms import grid_size, to_samples


def test_derive_parameters_at_origin():
    omega, bernoulli = derive_parameters(0.0)
    assert omega == 1.0
    assert bernoulli == 0.5


def test_derive_parameters_rejects_singular_family():
    with pytest.raises(SingularParameterError):
        derive_parameters(1.0 / 3.0)


def test_laminar_level_solves_bernoulli_balance():
    for G, a in [(0.3, 0.05), (-0.2, 0.1), (1.0, -0.1)]:
        omega, bernoulli = derive_parameters(a)
        c = laminar(G, a)
        assert 0.5 * (1.0 + omega * c) ** 2 == pytest.approx(bernoulli - G * c, abs=1e-12)


def test_laminar_level_irrotational_cases():
    assert laminar_level(0.0, 1.5, 2.0) == pytest.approx(0.5)
    with pytest.raises(NoLaminarError):
        laminar_level(0.0, 1.0, 0.0)
    with pytest.raises(NoLaminarError):
        laminar_level(1.0, -10.0, 0.0)


def test_general_params_match_family():
    omega, bernoulli = derive_parameters(0.1)
    general = GeneralParams(omega=omega, bernoulli=bernoulli, G=0.2, d=4.0)
    family = Params(G=0.2, a=0.1, l=0.5)
    assert constants_of(general) == constants_of(family)


def test_exact_solution_coefficients():
    t = exact_solution(0.04, 5)
    r = 0.2
    assert t.coeffs[0] == 0.0
    assert t.coeffs[1] == pytest.approx(-4.0 * r)
    assert t.coeffs[2] == pytest.approx(4.0 * r ** 2)
    assert t.coeffs[5] == pytest.approx(-4.0 * r ** 5)


def test_exact_solution_default_truncation_resolves_tail():
    t = exact_solution(0.1)
    assert abs(t.coeffs[-1]) < 1e-13


def test_exact_solution_domain():
    with pytest.raises(DivergentSeriesError):
        exact_solution(1.0, 8)
    with pytest.raises(ParameterError):
        exact_solution(-0.1, 8)


def test_exact_surface_matches_trace():
    a = 0.12
    t = exact_solution(a, 128)
    alphas = node_angles(64)
    _, y = exact_surface(a, alphas)
    assert np.allclose(y, to_samples(t, 512).values[::8], atol=1e-12)


def test_family_constants_are_ordered():
    assert A_CRIT == pytest.approx(0.171572875, abs=1e-9)
    assert A_CRIT < A_MAX < 0.25


@pytest.mark.parametrize("a", [0.0, 0.05, 0.1, 0.2])
def test_exact_family_solves_zero_gravity_equation(a):
    t = exact_solution(a, 64)
    assert sup_norm(residual(t, Params(G=0.0, a=a, l=0.0))) < 1e-12


def test_exact_family_fails_with_gravity():
    t = exact_solution(0.1, 64)
    assert sup_norm(residual(t, Params(G=0.5, a=0.1, l=0.0))) > 1e-3


def test_rational_form_vanishes_with_polynomial_form():
    t = exact_solution(0.15, 64)
    p = Params(G=0.0, a=0.15, l=0.0)
    assert sup_norm(residual(t, p, form=RATIONAL)) < 1e-12
    other = exact_solution(0.1, 64)
    assert sup_norm(residual(other, p, form=RATIONAL)) > 1e-6


def test_residual_vanishes_at_laminar_flow():
    for p in (Params(G=0.4, a=0.1, l=0.5), Params(G=-0.2, a=0.05, l=0.0)):
        assert sup_norm(residual(laminar_trace(p, 8), p)) < 1e-13


def test_residual_rejects_unknown_form():
    with pytest.raises(ParameterError):
        residual(HoloTrace.zeros(4), Params(G=0.0, a=0.0), form="cubic")


def test_residual_outside_admissible_set():
    # b_1 = -1 makes z_alpha vanish at alpha = 0 in deep water
    t = HoloTrace(np.array([0.0, -1.0]))
    with pytest.raises(OutsideUError):
        residual(t, Params(G=0.0, a=0.0), M=64)


def test_fd_jacobian_matches_laminar_diagonal():
    p = Params(G=0.1, a=0.05, l=0.2)
    t = laminar_trace(p, 16)
    fd = jacobian(t, p, method="fd")
    assert np.max(np.abs(fd - np.diag(laminar_multipliers(p, 16)))) < 1e-6


def test_laminar_multipliers_at_origin():
    diag = laminar_multipliers(Params(G=0.0, a=0.0), 6)
    assert np.allclose(diag[1:], -(np.arange(1, 7) - 1.0))


def test_auto_jacobian_uses_analytic_diagonal_at_laminar():
    p = Params(G=0.3, a=0.1)
    t = laminar_trace(p, 6)
    assert np.count_nonzero(jacobian(t, p) - np.diag(np.diag(jacobian(t, p)))) == 0
    with pytest.raises(DifferentiationError):
        jacobian(exact_solution(0.1, 6), p, method="analytic")


def test_fd_jacobian_linearizes_residual(rng):
    p = Params(G=0.2, a=0.1)
    t = exact_solution(0.1, 16)
    M = grid_size(16)
    J = jacobian(t, p, M)
    direction = rng.normal(size=17) * 1e-7
    change = residual_vector(HoloTrace(t.coeffs + direction), p, M) - residual_vector(t, p, M)
    assert np.max(np.abs(change - J @ direction)) < 1e-10


def test_parameter_derivative_matches_difference():
    p = Params(G=0.2, a=0.1)
    t = exact_solution(0.1, 16)
    M = grid_size(16)
    column = parameter_derivative(t, p, M)
    h = 1e-5
    diff = (residual_vector(t, p.with_a(0.1 + h), M) - residual_vector(t, p.with_a(0.1 - h), M)) / (2 * h)
    assert np.allclose(column, diff, atol=1e-6)


@pytest.mark.parametrize("G", [-0.2, 0.0, 0.3])
def test_mode_one_multiplier_equals_gravity_at_origin(G):
    assert mode_one_multiplier(G, 0.0, 0.0) == pytest.approx(G, abs=1e-12)


def test_bifurcation_gravity_and_parameter_are_inverse():
    assert abs(bifurcation_G(0.0)) < 1e-10
    G = bifurcation_G(0.05, 0.3)
    assert abs(mode_one_multiplier(G, 0.05, 0.3)) < 1e-10
    assert bifurcation_parameter(G, 0.3) == pytest.approx(0.05, abs=1e-9)


def test_bifurcation_coefficients_at_origin():
    coefficients = bifurcation_coefficients(0.0, 0.0)
    assert coefficients.transversality == pytest.approx(-2.0, rel=0.05)
    assert coefficients.curvature == pytest.approx(0.125, rel=0.05)
    assert coefficients.closed_form["transversality"] == -2.0
    assert "closed_form_curvature" in coefficients.to_dict()


def test_closed_form_coefficients():
    closed = closed_form_coefficients(0.0)
    assert closed["curvature"] == pytest.approx(0.5)
    assert closed["second_variation_constant"] == pytest.approx(0.0)


def test_second_variation_matches_field():
    a = 0.05
    G = bifurcation_G(a)
    grid = second_variation(a, G=G)
    field = second_variation_field(a, grid.alphas, G)
    assert np.max(np.abs(grid.values - field)) < 1e-5


def test_second_variation_at_origin_is_cos_squared():
    alphas = node_angles(16)
    assert np.allclose(second_variation_field(0.0, alphas, 0.0), np.cos(alphas) ** 2)


def test_params_depth():
    assert math.isinf(Params(G=0.0, a=0.0).depth)
    assert Params(G=0.0, a=0.0, l=0.5).depth == pytest.approx(4.0)


@pytest.mark.parametrize("a, l", [(0.0, 0.0), (0.05, 0.0), (0.0, 0.2), (0.05, 0.2)])
def test_cos_alpha_spans_kernel_at_bifurcation(a, l):
    sigma, alignment = laminar_kernel(a, l)
    assert sigma < 1e-6
    assert alignment > 0.999


def test_exact_family_solves_equation_past_touching():
    # Self-intersecting for a > A_MAX, still a solution of the surface equation
    a = 0.3
    p = Params(G=0.0, a=a, l=0.0)
    t = exact_solution(a, 128)
    error = sup_norm(residual(t, p))
    scale = constants_of(p).bernoulli * float(np.max(surface_terms(t, constants_of(p), grid_size(128)).denominator))
    assert error < 1e-9
    assert error < 1e-13 * scale


def test_residual_forms_agree_pointwise(rng):
    p = Params(G=0.1, a=0.05, l=0.2)
    N = 8
    M = grid_size(N)
    for _ in range(3):
        t = HoloTrace(rng.normal(size=N + 1) * 0.05 * 0.5 ** np.arange(N + 1))
        polynomial = residual(t, p, M).values
        rational = residual(t, p, M, form=RATIONAL).values
        denominator = surface_terms(t, constants_of(p), M).denominator
        scale = 1.0 + np.max(np.abs(polynomial))
        assert np.max(np.abs(rational * denominator - polynomial)) < 1e-12 * scale


def test_fd_jacobian_error_is_second_order():
    p = Params(G=0.1, a=0.05, l=0.2)
    N = 8
    t = laminar_trace(p, N)
    diag = np.diag(laminar_multipliers(p, N))
    errors = [float(np.max(np.abs(jacobian(t, p, method="fd", step=h) - diag))) for h in (1e-2, 5e-3, 2.5e-3)]
    assert errors[1] < 0.3 * errors[0]
    assert errors[2] < 0.3 * errors[1]


def test_bifurcation_gravity_matches_dense_scan():
    a = 0.01

    def lam(G):
        try:
            return mode_one_multiplier(G, a, 0.0)
        except WaveSolverError:
            return math.nan

    grid = np.linspace(-0.2, 0.2, 4001)
    values = np.array([lam(G) for G in grid])
    brackets = [
        (grid[i], grid[i + 1]) for i in range(grid.size - 1)
        if np.isfinite(values[i]) and np.isfinite(values[i + 1]) and values[i] * values[i + 1] <= 0.0
    ]
    lo, hi = min(brackets, key=lambda br: abs(br[0] + br[1]))
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if lam(lo) * lam(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    assert bifurcation_G(a) == pytest.approx(0.5 * (lo + hi), abs=1e-8)

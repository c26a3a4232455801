import math

import numpy as np
import pytest

from vorticity_waves.critlayer.contour import trace_and_classify
from vorticity_waves.critlayer.stream import stream_extension
from vorticity_waves.errors import (
    BranchSwitchError,
    EventNotFoundError,
    NoConvergenceError,
    OutsideUError,
    ParameterError,
    StalledBranchError,
)
from vorticity_waves.geometry.profile import assess_solution
from vorticity_waves.model.parameters import A_CRIT, A_MAX, constants_of, exact_solution, laminar_trace
from vorticity_waves.models.schemas import CritSide, EventKind, GeneralParams, Params, SolverOptions, WaveClass
from vorticity_waves.solver.branch import TOUCH, Branch, interpolate_traces
from vorticity_waves.solver.continuation import (
    arclength_step,
    branch_from_bifurcation,
    bifurcation_seeds,
    branch_switch,
    continue_branch,
)
from vorticity_waves.solver.events import event_indicator, locate_event, refine_event
from vorticity_waves.solver.newton import damped_newton, newton_solve
from vorticity_waves.solver.tracking import SolveTracker
from vorticity_waves.spectral.trace import HoloTrace


def test_damped_newton_finds_scalar_root():
    def F(x):
        value = x * x - 2.0
        return value, float(np.max(np.abs(value)))

    outcome = damped_newton(F, lambda x: np.array([[2.0 * x[0]]]), np.array([1.0]), 1e-14, 20)
    assert outcome.x[0] == pytest.approx(math.sqrt(2.0))
    assert outcome.residual_norm < 1e-14


def test_damped_newton_reports_failure_without_root():
    def F(x):
        value = x * x + 1.0
        return value, float(np.max(np.abs(value)))

    with pytest.raises(NoConvergenceError) as info:
        damped_newton(F, lambda x: np.array([[2.0 * x[0]]]), np.array([0.5]), 1e-12, 10)
    assert "residual_norm" in info.value.details


def test_newton_solve_accepts_exact_solution_immediately():
    tracker = SolveTracker()
    s = newton_solve(exact_solution(0.1, 64), Params(G=0.0, a=0.1), tracker=tracker)
    assert s.diagnostics["iterations"] == 0.0
    assert s.residual_norm < 1e-11
    assert s.wave_class == WaveClass.REGULAR
    assert tracker.get_statistics("solve")["successful_solves"] == 1


def test_newton_solve_returns_to_laminar_flow():
    p = Params(G=0.3, a=0.05)
    start = laminar_trace(p, 16).coeffs.copy()
    start[2] += 1e-3
    s = newton_solve(HoloTrace(start), p)
    assert s.residual_norm < 1e-11
    assert s.trace.oscillation() < 1e-9
    assert s.trace.coeffs[0] == pytest.approx(laminar_trace(p, 16).coeffs[0], abs=1e-10)


def test_newton_solve_records_failures():
    tracker = SolveTracker(run_id="faulty")
    with pytest.raises(OutsideUError):
        newton_solve(HoloTrace(np.array([0.0, -1.0, 0.0, 0.0])), Params(G=0.0, a=0.0), tracker=tracker)
    assert tracker.failure_reasons() == [("outside_u", 1)]
    assert tracker.summary()["solves"] == 1


def test_branch_switch_follows_zero_gravity_family():
    # At G = 0 the bifurcating branch is the exact family, a = b_1^2 / 16
    for s in (0.03, 0.06, 0.1):
        solution = branch_switch(0.0, 0.0, 0.0, s, N=32)
        assert solution.amplitude == s
        assert solution.a == pytest.approx(s * s / 16.0, abs=1e-9)
        assert solution.residual_norm < 1e-11
        assert solution.wave_class == WaveClass.REGULAR


def test_branch_switch_with_zero_amplitude_is_laminar():
    solution = branch_switch(0.0, 0.0, 0.0, 0.0, N=8)
    assert solution.wave_class == WaveClass.LAMINAR
    assert solution.a == 0.0


def test_branch_switch_requires_neutral_point():
    with pytest.raises(BranchSwitchError):
        branch_switch(0.1, 0.0, 0.0, 0.01, N=8)


def test_continue_branch_tracks_exact_family(exact_point):
    options = SolverOptions(da_initial=1e-3, escalate=False)
    branch = continue_branch(exact_point(0.05, 32), 0.053, options)
    assert branch.status == "complete"
    assert branch.points[-1].a == pytest.approx(0.053, abs=1e-12)
    assert np.all(np.diff(branch.parameters) > 0.0)
    for point in branch.points:
        assert np.max(np.abs(point.trace.coeffs - exact_solution(point.a, 32).coeffs)) < 1e-8
    assert branch.summary["points"] == len(branch.points)
    assert branch.summary["final_class"] == WaveClass.REGULAR.value


def test_continue_branch_marches_downwards(exact_point):
    branch = continue_branch(exact_point(0.06, 32), 0.058, SolverOptions(escalate=False))
    assert branch.path["direction"] == -1.0
    assert branch.points[-1].a == pytest.approx(0.058, abs=1e-12)


def test_continue_branch_needs_family_parameters():
    omega, bernoulli = 1.0, 0.5
    start = assess_solution(HoloTrace.zeros(4), GeneralParams(omega=omega, bernoulli=bernoulli))
    with pytest.raises(ParameterError):
        continue_branch(start, 0.1)


def test_continue_branch_stalls_with_partial_branch(exact_point):
    options = SolverOptions(newton_tol=1e-30, max_newton_iters=1, da_min=1e-4, escalate=False)
    with pytest.raises(StalledBranchError) as info:
        continue_branch(exact_point(0.05, 16), 0.06, options)
    branch = info.value.branch
    assert branch.status == "stalled"
    assert len(branch.points) == 1
    assert branch.summary["failed_steps"] >= 2


def test_arclength_step_stays_on_family(exact_point):
    previous, current = exact_point(0.05, 32), exact_point(0.051, 32)
    solution = arclength_step(previous, current, SolverOptions())
    assert solution.a > 0.051
    assert np.max(np.abs(solution.trace.coeffs - exact_solution(solution.a, 32).coeffs)) < 1e-8


def test_branch_from_bifurcation_at_zero_gravity():
    tracker = SolveTracker()
    branch = branch_from_bifurcation(0.0, 0.0, target=0.002, s=0.04, N=32, tracker=tracker)
    bifurcation = branch.events_of(EventKind.BIFURCATION)
    assert len(bifurcation) == 1
    assert abs(bifurcation[0].value) < 1e-10
    assert bifurcation[0].solution.wave_class == WaveClass.LAMINAR
    assert branch.points[-1].a == pytest.approx(0.002, abs=1e-12)
    for point in branch.points:
        assert point.amplitude ** 2 / 16.0 == pytest.approx(point.a, abs=1e-9)
    assert tracker.get_statistics("branch_switch")["successful_solves"] == 2


def test_refine_breaking_between_exact_points(exact_point):
    value, solution = refine_event(exact_point(0.16), exact_point(0.18), EventKind.BREAKING)
    assert abs(value - A_CRIT) < 1e-6
    assert abs(solution.diagnostics["min_x_slope"]) < 1e-6


def test_locate_overhang_onset_returns_overhanging_side(exact_point):
    branch = Branch(points=[exact_point(0.16), exact_point(0.18)], path={"G": 0.0, "l": 0.0})
    value, solution = locate_event(branch, EventKind.OVERHANG_ONSET)
    assert abs(value - A_CRIT) < 1e-6
    assert solution.diagnostics["min_x_slope"] < 0.0


def test_refine_touching_below_self_intersection(exact_point):
    value, solution = refine_event(exact_point(0.20), exact_point(0.21), EventKind.TOUCHING)
    assert abs(value - A_MAX) < 1e-3
    assert solution.wave_class == WaveClass.TOUCHING


def test_locate_event_without_sign_change(exact_point):
    branch = Branch(points=[exact_point(0.05), exact_point(0.1)], path={})
    with pytest.raises(EventNotFoundError):
        locate_event(branch, EventKind.BREAKING)
    with pytest.raises(EventNotFoundError):
        locate_event(branch, EventKind.TOUCHING)
    with pytest.raises(EventNotFoundError):
        locate_event(branch, EventKind.BIFURCATION)


def test_refine_event_requires_bracket(exact_point):
    with pytest.raises(EventNotFoundError):
        refine_event(exact_point(0.05), exact_point(0.1), EventKind.BREAKING)
    with pytest.raises(ParameterError):
        event_indicator(exact_point(0.05), EventKind.BIFURCATION, SolverOptions())


def test_interpolate_traces_pads_and_extrapolates():
    t1 = HoloTrace(np.array([0.0, 1.0]))
    t2 = HoloTrace(np.array([0.0, 2.0, 1.0]))
    mid = interpolate_traces(t1, 0.0, t2, 1.0, 0.5)
    assert mid.coeffs.tolist() == [0.0, 1.5, 0.5]
    beyond = interpolate_traces(t1, 0.0, t2, 1.0, 2.0)
    assert beyond.coeffs.tolist() == [0.0, 3.0, 2.0]


def test_branch_events_are_sorted(exact_point):
    s = exact_point(0.05, 8)
    branch = Branch(points=[s], path={})
    branch.add_event(EventKind.TOUCHING, 0.2, s)
    branch.add_event(EventKind.BREAKING, 0.17, s)
    assert [event.kind for event in branch.events] == [EventKind.BREAKING, EventKind.TOUCHING]
    assert len(branch.events_of(EventKind.BREAKING)) == 1
    assert branch.N == 8


def test_solve_tracker_statistics():
    tracker = SolveTracker(run_id="stats")
    tracker.record_solve("predictor", 0.1, 3, True, 0.5, 1e-12)
    tracker.record_solve("predictor", 0.11, 5, False, 1.5, error="no_convergence")
    tracker.record_solve("event", 0.12, 2, True, 0.1, 1e-13)
    stats = tracker.get_statistics("predictor")
    assert stats["total_solves"] == 2
    assert stats["failed_solves"] == 1
    assert stats["total_iterations"] == 8
    assert stats["avg_duration"] == pytest.approx(1.0)
    assert len(tracker.get_history("event")) == 1
    assert tracker.failure_reasons() == [("no_convergence", 1)]
    assert tracker.summary()["run_id"] == "stats"


def test_touch_target_constant():
    assert TOUCH == "touch"


def test_newton_solve_returns_to_exact_solution():
    target = exact_solution(0.2, 64)
    start = target.coeffs.copy()
    start[2] += 1e-3
    s = newton_solve(HoloTrace(start), Params(G=0.0, a=0.2, l=0.0), SolverOptions(escalate=False))
    assert s.residual_norm < 1e-11
    assert np.max(np.abs(s.trace.coeffs - target.coeffs)) < 1e-9


def test_continue_branch_is_deterministic(exact_point):
    options = SolverOptions(da_initial=1e-3, escalate=False)
    first = continue_branch(exact_point(0.05, 32), 0.053, options)
    second = continue_branch(exact_point(0.05, 32), 0.053, options)
    assert first.parameters.tolist() == second.parameters.tolist()
    for one, other in zip(first.points, second.points):
        assert np.array_equal(one.trace.coeffs, other.trace.coeffs)


def test_continued_branch_follows_square_root_law():
    G = 0.01
    a_bif, first, second = bifurcation_seeds(G, 0.0, s=0.01, N=32)
    direction = math.copysign(1.0, second.a - a_bif)
    options = SolverOptions(da_initial=5e-5, da_max=5e-5, escalate=False)
    branch = continue_branch(first, a_bif + direction * 4e-4, options, seed=second)
    assert len(branch.points) >= 6
    offsets = np.abs(branch.parameters - a_bif)
    amplitudes = np.abs([point.amplitude for point in branch.points])
    slope, _ = np.polyfit(np.log(offsets), np.log(amplitudes), 1)
    assert slope == pytest.approx(0.5, abs=0.02)


@pytest.fixture(
    scope="module",
    params=[(0.01, CritSide.ABOVE_SURFACE), (-0.01, CritSide.BELOW_SURFACE)],
    ids=["positive_gravity", "negative_gravity"],
)
def touching_branch(request):
    G, side = request.param
    return branch_from_bifurcation(G, 0.0, TOUCH, N=64), side


@pytest.mark.slow
def test_branch_reaches_touching_through_breaking(touching_branch):
    branch, _ = touching_branch
    assert branch.status == "touching"
    assert branch.points[-1].diagnostics["self_gap"] < 1e-3
    touching = branch.events_of(EventKind.TOUCHING)
    breaking = branch.events_of(EventKind.BREAKING)
    assert touching and breaking
    assert abs(breaking[0].solution.diagnostics["min_x_slope"]) < 1e-6
    assert breaking[0].value < touching[0].value
    assert touching[0].value == pytest.approx(A_MAX, abs=5e-3)


@pytest.mark.slow
def test_critical_layer_side_at_breaking(touching_branch):
    branch, side = touching_branch
    event = branch.events_of(EventKind.BREAKING)[0]
    report = trace_and_classify(stream_extension(event.solution))
    assert report.k == 3
    assert report.side == side
    assert report.relative_mismatch < 0.1


@pytest.mark.slow
def test_finite_depth_branch_reaches_breaking():
    branch = branch_from_bifurcation(0.01, 0.2, TOUCH, N=64)
    breaking = branch.events_of(EventKind.BREAKING)
    assert breaking
    solution = breaking[0].solution
    depth = constants_of(solution.params).depth
    assert abs(solution.diagnostics["min_x_slope"]) < 1e-6
    assert solution.diagnostics["depth_H"] == pytest.approx(depth - solution.trace.coeffs[0])

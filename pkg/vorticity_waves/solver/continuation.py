"""
Branch switching off the laminar family and natural-parameter continuation in a
"""
import logging
import math
import time
from typing import Optional, Tuple

import numpy as np

from vorticity_waves.config import settings
from vorticity_waves.errors import (
    BranchSwitchError,
    NoConvergenceError,
    ParameterError,
    StalledBranchError,
    WaveSolverError,
)
from vorticity_waves.geometry.profile import assess_solution
from vorticity_waves.model.bifurcation import bifurcation_parameter, mode_one_multiplier
from vorticity_waves.model.parameters import laminar_trace
from vorticity_waves.model.residual import jacobian, parameter_derivative, project, residual
from vorticity_waves.model.solution import Solution
from vorticity_waves.models.schemas import EventKind, Params, SolverOptions, WaveClass
from vorticity_waves.solver.branch import TOUCH, Branch, Target, interpolate_traces
from vorticity_waves.solver.events import event_indicator, refine_event
from vorticity_waves.solver.newton import damped_newton, newton_solve
from vorticity_waves.solver.tracking import SolveTracker
from vorticity_waves.spectral.trace import HoloTrace
from vorticity_waves.spectral.transforms import grid_size

logger = logging.getLogger(__name__)

NEUTRAL_TOL = 1e-6
COLLAPSE_RATIO = 0.1


def branch_switch(
    a_bif: float,
    G: float,
    l: float = 0.0,
    s: Optional[float] = None,
    options: Optional[SolverOptions] = None,
    N: Optional[int] = None,
    tracker: Optional[SolveTracker] = None,
) -> Solution:
    """
    Leave the laminar family at a neutral point along cos(alpha)

    The cos(alpha) coefficient is pinned to ``s`` and a takes its place among
    the Newton unknowns, so the corrector solves for (b_0, a, b_2, ..., b_N)
    starting from the laminar trace plus s*cos(alpha).

    Args:
        a_bif: Family parameter where lambda_1 vanishes
        G: Gravity
        l: Depth parameter
        s: Pinned amplitude (default from settings)
        options: Solver options
        N: Truncation order
        tracker: Optional solve tracker

    Returns:
        Solution on the bifurcating branch (the laminar Solution when s == 0)
    """
    options = options or SolverOptions()
    s = settings.switch_amplitude if s is None else float(s)
    N = N or settings.truncation
    base = Params(G=G, a=a_bif, l=l)

    multiplier = mode_one_multiplier(G, a_bif, l)
    if abs(multiplier) >= NEUTRAL_TOL:
        raise BranchSwitchError(
            f"lambda_1 = {multiplier:.3e} is not neutral at a={a_bif}",
            details={"lambda_1": multiplier, "a": a_bif, "G": G, "l": l},
        )
    laminar = laminar_trace(base, N)
    if s == 0.0:
        return assess_solution(laminar, base, options, diagnostics={"a_bif": a_bif, "switch_amplitude": 0.0})

    M = grid_size(N, options.dealias_factor)

    def unpack(x: np.ndarray) -> Tuple[HoloTrace, Params]:
        coeffs = x.copy()
        coeffs[1] = s
        return HoloTrace(coeffs), base.with_a(float(x[1]))

    def F(x: np.ndarray):
        trace, params = unpack(x)
        samples = residual(trace, params, M, denominator_floor=options.denominator_floor)
        return project(samples, N), float(np.max(np.abs(samples.values)))

    def J(x: np.ndarray) -> np.ndarray:
        trace, params = unpack(x)
        matrix = jacobian(trace, params, M, method="fd", step=options.fd_step,
                          denominator_floor=options.denominator_floor)
        matrix[:, 1] = parameter_derivative(trace, params, M, options.fd_step, options.denominator_floor)
        return matrix

    x0 = laminar.coeffs.copy()
    x0[1] = a_bif
    start = time.perf_counter()
    try:
        outcome = damped_newton(F, J, x0, options.newton_tol, options.max_newton_iters,
                                options.damping_factor, options.max_halvings)
        trace, params = unpack(outcome.x)
        solution = assess_solution(trace, params, options, diagnostics={
            "iterations": float(outcome.iterations),
            "a_bif": a_bif,
            "switch_amplitude": s,
        })
        if not solution.residual_norm < options.newton_tol:
            raise NoConvergenceError(f"Independent residual check failed: {solution.residual_norm:.3e}")
    except WaveSolverError as e:
        if tracker is not None:
            tracker.record_solve("branch_switch", a_bif, 0, False, time.perf_counter() - start, error=e.reason)
        raise BranchSwitchError(
            f"Branch switch at a={a_bif} with s={s} failed: {e.message}",
            details={"a_bif": a_bif, "s": s, "cause": e.reason},
        ) from e

    if tracker is not None:
        tracker.record_solve("branch_switch", params.a, outcome.iterations, True,
                             time.perf_counter() - start, solution.residual_norm)
    logger.info(f"Branch switch at a_bif={a_bif:.10f}, s={s}: a={params.a:.10f}")
    return solution


def bifurcation_seeds(
    G: float,
    l: float = 0.0,
    s: Optional[float] = None,
    options: Optional[SolverOptions] = None,
    N: Optional[int] = None,
    tracker: Optional[SolveTracker] = None,
) -> Tuple[float, Solution, Solution]:
    """
    Neutral point at fixed (G, l) and the two branch-switch solutions at s and 2s

    Returns:
        (a_bif, first, second)
    """
    s = settings.switch_amplitude if s is None else float(s)
    a_bif = bifurcation_parameter(G, l)
    first = branch_switch(a_bif, G, l, s, options, N, tracker)
    second = branch_switch(a_bif, G, l, 2.0 * s, options, N, tracker)
    return a_bif, first, second


def _reached(a: float, target: Target, direction: float) -> bool:
    if target == TOUCH:
        return False
    return direction * (float(target) - a) <= 1e-14 * (1.0 + abs(float(target)))


def _check_not_collapsed(predicted: HoloTrace, solution: Solution):
    expected = predicted.oscillation()
    if expected > 1e-8 and solution.trace.oscillation() < COLLAPSE_RATIO * expected:
        raise NoConvergenceError(
            f"Corrector collapsed onto the laminar flow at a={solution.a:.10f}",
            details={"collapsed": True},
        )


def _predict(branch: Branch, a_next: float) -> HoloTrace:
    current = branch.points[-1]
    if len(branch.points) < 2:
        return current.trace
    previous = branch.points[-2]
    return interpolate_traces(previous.trace, previous.a, current.trace, current.a, a_next)


def arclength_step(
    previous: Solution,
    current: Solution,
    options: SolverOptions,
    tracker: Optional[SolveTracker] = None,
) -> Solution:
    """
    One pseudo-arclength step in (b, a) along the secant through two points

    The secant length sets the step. The extra equation keeps the update
    orthogonal to the secant direction.
    """
    N = max(previous.N, current.N)
    M = grid_size(N, options.dealias_factor)
    x_prev = np.append(previous.trace.resized(N).coeffs, previous.a)
    x_curr = np.append(current.trace.resized(N).coeffs, current.a)
    chord = x_curr - x_prev
    length = float(np.linalg.norm(chord))
    if length == 0.0:
        raise NoConvergenceError("Arclength step needs two distinct points")
    tangent = chord / length
    predicted = x_curr + length * tangent
    params = current.params

    def F(x: np.ndarray):
        samples = residual(HoloTrace(x[:-1]), params.with_a(float(x[-1])), M,
                           denominator_floor=options.denominator_floor)
        constraint = float(np.dot(tangent, x - predicted))
        vector = np.append(project(samples, N), constraint)
        return vector, max(float(np.max(np.abs(samples.values))), abs(constraint))

    def J(x: np.ndarray) -> np.ndarray:
        trace = HoloTrace(x[:-1])
        point = params.with_a(float(x[-1]))
        matrix = np.empty((N + 2, N + 2))
        matrix[:-1, :-1] = jacobian(trace, point, M, method="fd", step=options.fd_step,
                                    denominator_floor=options.denominator_floor)
        matrix[:-1, -1] = parameter_derivative(trace, point, M, options.fd_step, options.denominator_floor)
        matrix[-1, :] = tangent
        return matrix

    start = time.perf_counter()
    try:
        outcome = damped_newton(F, J, predicted, options.newton_tol, options.max_newton_iters,
                                options.damping_factor, options.max_halvings)
        a = float(outcome.x[-1])
        solution = assess_solution(HoloTrace(outcome.x[:-1]), params.with_a(a), options,
                                   diagnostics={"iterations": float(outcome.iterations), "arclength": 1.0})
        if not solution.residual_norm < options.newton_tol:
            raise NoConvergenceError(f"Independent residual check failed: {solution.residual_norm:.3e}")
    except WaveSolverError as e:
        if tracker is not None:
            tracker.record_solve("arclength", current.a, 0, False, time.perf_counter() - start, error=e.reason)
        raise
    if tracker is not None:
        tracker.record_solve("arclength", a, outcome.iterations, True, time.perf_counter() - start,
                             solution.residual_norm)
    return solution


def _maybe_refine_breaking(branch: Branch, options: SolverOptions, tracker: Optional[SolveTracker]):
    previous, current = branch.points[-2], branch.points[-1]
    if current.wave_class == WaveClass.INVALID or previous.wave_class == WaveClass.INVALID:
        return
    f_prev = event_indicator(previous, EventKind.BREAKING, options)
    f_curr = event_indicator(current, EventKind.BREAKING, options)
    if f_prev * f_curr >= 0.0:
        return
    try:
        value, solution = refine_event(previous, current, EventKind.BREAKING, options, tracker)
    except WaveSolverError as e:
        logger.warning(f"Breaking refinement between a={previous.a} and a={current.a} failed: {e.message}")
        return
    branch.add_event(EventKind.BREAKING, value, solution)


def continue_branch(
    start: Solution,
    target: Target,
    options: Optional[SolverOptions] = None,
    seed: Optional[Solution] = None,
    tracker: Optional[SolveTracker] = None,
) -> Branch:
    """
    March a at fixed (G, l) from a converged Solution

    The predictor is the previous solution, or the secant through the last two
    points once there are two. Steps grow after cheap corrections and shrink
    after failures. Two failures at the minimum step trigger one
    pseudo-arclength step. Corrections that fall back onto the laminar flow or
    cross the surface are treated as failures.

    Args:
        start: Converged Solution with Params
        target: Final a, or "touch" to march until the self-gap drops below gap_tol
        options: Solver options
        seed: Optional second point fixing the secant and the direction
        tracker: Optional solve tracker

    Returns:
        Branch with status "complete" or "touching"

    Raises:
        StalledBranchError: step underflow; the partial Branch is attached
    """
    options = options or SolverOptions()
    if not isinstance(start.params, Params):
        raise ParameterError("Continuation in a needs (G, a, l) parameters")
    if target != TOUCH:
        target = float(target)

    if seed is not None:
        direction = math.copysign(1.0, seed.a - start.a)
    elif target == TOUCH:
        direction = 1.0
    else:
        direction = math.copysign(1.0, target - start.a)

    branch = Branch(
        points=[start] + ([seed] if seed is not None else []),
        path={
            "G": start.params.G,
            "l": start.params.l,
            "a_start": start.a,
            "a_end": target,
            "direction": direction,
        },
    )
    if seed is not None:
        da = min(options.da_initial, max(options.da_min, 2.0 * abs(seed.a - start.a)))
    else:
        da = options.da_initial
    at_min_failures = 0
    failures = 0

    while len(branch.points) < options.max_points:
        current = branch.points[-1]
        if current.wave_class == WaveClass.TOUCHING:
            branch.status = "touching"
            branch.add_event(EventKind.TOUCHING, current.a, current)
            break
        if _reached(current.a, target, direction):
            break

        step = da
        if target != TOUCH:
            step = min(step, abs(target - current.a))
        a_next = current.a + direction * step
        guess = _predict(branch, a_next)
        try:
            solution = newton_solve(guess, current.params.with_a(a_next), options, tracker, stage="predictor")
            _check_not_collapsed(guess, solution)
            if solution.wave_class == WaveClass.INVALID:
                raise NoConvergenceError(f"Overshoot into a self-intersecting profile at a={a_next:.10f}")
        except WaveSolverError as e:
            failures += 1
            logger.debug(f"Step to a={a_next:.10f} rejected: {e.message}")
            da *= options.step_shrink
            if da >= options.da_min:
                continue
            da = options.da_min
            at_min_failures += 1
            if at_min_failures < 2:
                continue
            if len(branch.points) >= 2:
                try:
                    solution = arclength_step(branch.points[-2], current, options, tracker)
                    if solution.wave_class == WaveClass.INVALID:
                        raise NoConvergenceError("Arclength step crossed the surface")
                except WaveSolverError as fallback:
                    logger.warning(f"Arclength fallback failed at a={current.a:.10f}: {fallback.message}")
                    solution = None
            else:
                solution = None
            if solution is None:
                branch.status = "stalled"
                branch.summary = _summarize(branch, failures, tracker)
                raise StalledBranchError(
                    f"Step underflow at a={current.a:.10f}",
                    branch=branch,
                    details={"a": current.a, "points": len(branch.points)},
                ) from e
            logger.info(f"Arclength fallback moved the branch to a={solution.a:.10f}")

        branch.points.append(solution)
        at_min_failures = 0
        if solution.diagnostics.get("iterations", 0.0) <= options.grow_after_iters:
            da = min(da * options.step_grow, options.da_max)
        da = min(max(da, options.da_min), options.da_max)
        if options.refine_events:
            _maybe_refine_breaking(branch, options, tracker)

    branch.summary = _summarize(branch, failures, tracker)
    logger.info(
        f"Branch at G={branch.path['G']}, l={branch.path['l']}: {len(branch.points)} points, "
        f"status {branch.status}, final a={branch.points[-1].a:.10f}"
    )
    return branch


def _summarize(branch: Branch, failures: int, tracker: Optional[SolveTracker]) -> dict:
    final = branch.points[-1]
    summary = {
        "status": branch.status,
        "points": len(branch.points),
        "failed_steps": failures,
        "a_final": final.a,
        "final_class": final.wave_class.value,
        "final_self_gap": final.diagnostics.get("self_gap"),
        "events": {kind.value: len(branch.events_of(kind)) for kind in EventKind},
    }
    if tracker is not None:
        summary["solves"] = tracker.summary()
    return summary


def branch_from_bifurcation(
    G: float,
    l: float = 0.0,
    target: Target = TOUCH,
    s: Optional[float] = None,
    options: Optional[SolverOptions] = None,
    N: Optional[int] = None,
    tracker: Optional[SolveTracker] = None,
) -> Branch:
    """
    Continue the branch bifurcating from the laminar family at fixed (G, l)

    Starts from the two branch-switch solutions at s and 2s and records the
    bifurcation point as the first event.
    """
    options = options or SolverOptions()
    a_bif, first, second = bifurcation_seeds(G, l, s, options, N, tracker)
    branch = continue_branch(first, target, options, seed=second, tracker=tracker)
    laminar = branch_switch(a_bif, G, l, 0.0, options, first.N)
    branch.add_event(EventKind.BIFURCATION, a_bif, laminar)
    branch.path["a_bif"] = a_bif
    branch.summary["events"] = {kind.value: len(branch.events_of(kind)) for kind in EventKind}
    return branch

"""
Bisection location of breaking, overhang onset and touching along a branch
"""
import logging
from typing import Optional, Tuple

from vorticity_waves.errors import EventNotFoundError, ParameterError
from vorticity_waves.model.solution import Solution
from vorticity_waves.models.schemas import EventKind, SolverOptions, WaveClass
from vorticity_waves.solver.branch import Branch, interpolate_traces
from vorticity_waves.solver.newton import newton_solve
from vorticity_waves.solver.tracking import SolveTracker

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 80


def event_indicator(solution: Solution, kind: EventKind, options: SolverOptions) -> float:
    """
    Scalar whose sign change marks the event

    min x_alpha for breaking and overhang onset, self-gap minus gap_tol for
    touching (a self-intersecting profile has gap 0).
    """
    if kind in (EventKind.BREAKING, EventKind.OVERHANG_ONSET):
        return float(solution.diagnostics["min_x_slope"])
    if kind == EventKind.TOUCHING:
        return float(solution.diagnostics["self_gap"]) - options.gap_tol
    raise ParameterError(f"No scalar indicator for event kind '{kind.value}'")


def _is_touching(solution: Solution, options: SolverOptions) -> bool:
    return solution.wave_class != WaveClass.INVALID and event_indicator(solution, EventKind.TOUCHING, options) < 0.0


def refine_event(
    lo: Solution,
    hi: Solution,
    kind: EventKind,
    options: Optional[SolverOptions] = None,
    tracker: Optional[SolveTracker] = None,
) -> Tuple[float, Solution]:
    """
    Bisect on a between two Solutions whose indicators have opposite signs

    Every trial is a full Newton solve from the interpolated trace.

    Args:
        lo: Solution on one side of the event
        hi: Solution on the other side
        kind: Event kind
        options: Solver options
        tracker: Optional solve tracker

    Returns:
        (refined a, Solution at it)
    """
    options = options or SolverOptions()
    f_lo = event_indicator(lo, kind, options)
    f_hi = event_indicator(hi, kind, options)
    if f_lo * f_hi > 0.0:
        raise EventNotFoundError(
            f"Indicator for {kind.value} does not change sign on [{lo.a}, {hi.a}]",
            details={"indicator_lo": f_lo, "indicator_hi": f_hi},
        )

    for _ in range(MAX_BISECTIONS):
        if kind == EventKind.TOUCHING:
            for candidate in (lo, hi):
                if _is_touching(candidate, options):
                    return candidate.a, candidate
        if abs(hi.a - lo.a) < options.event_tol:
            break
        mid = 0.5 * (lo.a + hi.a)
        guess = interpolate_traces(lo.trace, lo.a, hi.trace, hi.a, mid)
        trial = newton_solve(guess, lo.params.with_a(mid), options, tracker, stage="event")
        f_mid = event_indicator(trial, kind, options)
        logger.debug(f"{kind.value} bisection: a={mid:.12f} indicator={f_mid:.3e}")
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = trial, f_mid
        else:
            hi, f_hi = trial, f_mid

    if kind == EventKind.TOUCHING:
        raise EventNotFoundError(
            f"Bisection collapsed to a={lo.a:.10f} without a valid profile below gap_tol",
            details={"indicator_lo": f_lo, "indicator_hi": f_hi},
        )
    if kind == EventKind.OVERHANG_ONSET:
        found = lo if f_lo < 0.0 else hi
    else:
        found = lo if abs(f_lo) <= abs(f_hi) else hi
    logger.info(f"Located {kind.value} at a={found.a:.10f}")
    return found.a, found


def locate_event(
    branch: Branch,
    kind: EventKind,
    options: Optional[SolverOptions] = None,
    tracker: Optional[SolveTracker] = None,
) -> Tuple[float, Solution]:
    """
    Locate an event on a branch

    Args:
        branch: Branch whose consecutive points bracket the event
        kind: breaking, overhang_onset or touching (bifurcation is read
            from the branch events)
        options: Solver options
        tracker: Optional solve tracker

    Returns:
        (a*, Solution)
    """
    options = options or SolverOptions()
    if kind == EventKind.BIFURCATION:
        found = branch.events_of(EventKind.BIFURCATION)
        if not found:
            raise EventNotFoundError("Branch carries no bifurcation point")
        return found[0].value, found[0].solution

    points = sorted(branch.points, key=lambda point: point.a)
    if kind == EventKind.TOUCHING:
        for point in points:
            if _is_touching(point, options):
                return point.a, point

    indicators = [event_indicator(point, kind, options) for point in points]
    for i in range(len(points) - 1):
        left, right = indicators[i], indicators[i + 1]
        if left == 0.0 and kind == EventKind.BREAKING:
            return points[i].a, points[i]
        if left * right < 0.0 or (right == 0.0 and left != 0.0):
            return refine_event(points[i], points[i + 1], kind, options, tracker)

    raise EventNotFoundError(
        f"Indicator for {kind.value} never changes sign along the branch",
        details={"points": len(points)},
    )

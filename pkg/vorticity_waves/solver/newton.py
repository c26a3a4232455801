"""
Damped Newton solves of the projected surface equation
"""
import logging
import time
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve

from vorticity_waves.errors import NoConvergenceError, OutsideUError, WaveSolverError
from vorticity_waves.geometry.profile import assess_solution
from vorticity_waves.model.residual import jacobian, project, residual
from vorticity_waves.model.solution import Solution
from vorticity_waves.models.schemas import AnyParams, SolverOptions
from vorticity_waves.solver.tracking import SolveTracker
from vorticity_waves.spectral.trace import HoloTrace
from vorticity_waves.spectral.transforms import grid_size

logger = logging.getLogger(__name__)

ResidualFn = Callable[[np.ndarray], Tuple[np.ndarray, float]]
JacobianFn = Callable[[np.ndarray], np.ndarray]


@dataclass
class NewtonOutcome:
    x: np.ndarray
    iterations: int
    residual_norm: float


def _solve_linear(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        with np.errstate(all="ignore"):
            delta = lu_solve(lu_factor(matrix, check_finite=True), rhs)
        if np.all(np.isfinite(delta)):
            return delta
    except (LinAlgError, ValueError):
        pass
    delta, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    return delta


def damped_newton(
    F: ResidualFn,
    J: JacobianFn,
    x0: np.ndarray,
    tol: float,
    max_iters: int,
    damping: float = 0.5,
    max_halvings: int = 10,
) -> NewtonOutcome:
    """
    Newton iteration with backtracking on the Euclidean norm of the projected residual

    Args:
        F: x -> (projected residual, sup-norm of the grid residual); may raise OutsideUError
        J: x -> Jacobian of the projected residual
        x0: Initial unknowns
        tol: Target for the grid sup-norm
        max_iters: Iteration limit
        damping: Backtracking factor
        max_halvings: Backtracking limit per iteration

    Returns:
        NewtonOutcome
    """
    x = np.array(x0, dtype=float)
    vector, sup = F(x)
    for iteration in range(max_iters + 1):
        logger.debug(f"Newton iteration {iteration}: residual {sup:.3e}")
        if sup < tol:
            return NewtonOutcome(x, iteration, sup)
        if iteration == max_iters:
            break

        delta = _solve_linear(J(x), -vector)
        if float(np.max(np.abs(delta))) <= 1e-15 * (1.0 + float(np.max(np.abs(x)))):
            raise NoConvergenceError(
                f"Newton step vanished with residual {sup:.3e} above {tol:.1e}",
                details={"stalled": True, "residual_norm": sup, "iterations": iteration},
            )

        merit = float(np.linalg.norm(vector))
        factor = 1.0
        accepted = False
        for _ in range(max_halvings + 1):
            trial = x + factor * delta
            try:
                trial_vector, trial_sup = F(trial)
            except OutsideUError:
                factor *= damping
                continue
            if np.linalg.norm(trial_vector) < merit or trial_sup < tol:
                x, vector, sup = trial, trial_vector, trial_sup
                accepted = True
                break
            factor *= damping
        if not accepted:
            raise NoConvergenceError(
                f"Line search failed after {max_halvings} halvings (residual {sup:.3e})",
                details={"stalled": merit < 1e3 * tol, "residual_norm": sup, "iterations": iteration},
            )
        if factor < 1.0:
            logger.debug(f"Damped Newton step with factor {factor:.3g}")

    raise NoConvergenceError(
        f"No convergence in {max_iters} iterations (residual {sup:.3e})",
        details={"stalled": False, "residual_norm": sup, "iterations": max_iters},
    )


def _heavy_tail(trace: HoloTrace, options: SolverOptions) -> bool:
    """Tail energy above the threshold on a trace whose oscillation exceeds the tolerance"""
    return trace.oscillation() > options.newton_tol and trace.tail_energy_ratio() > options.tail_energy_threshold


def newton_solve(
    t0: HoloTrace,
    p: AnyParams,
    options: Optional[SolverOptions] = None,
    tracker: Optional[SolveTracker] = None,
    stage: str = "solve",
) -> Solution:
    """
    Solve the surface equation from an initial trace

    b_0..b_N are the unknowns and the equations are the cosine modes 0..N of
    the residual. When the coefficient tail is heavier than the threshold, or
    the projected system converges while the grid residual does not, the
    truncation is doubled (up to options.n_max) and the solve restarted from
    the padded iterate.

    Args:
        t0: Initial trace, inside the admissible set
        p: Parameters
        options: Solver options
        tracker: Optional SolveTracker receiving one record per solve
        stage: Label for the tracker

    Returns:
        Converged Solution with residual_norm < options.newton_tol
    """
    options = options or SolverOptions()
    start = time.perf_counter()
    trace = t0
    escalations = 0
    total_iterations = 0
    try:
        while True:
            N = trace.N
            M = grid_size(N, options.dealias_factor)

            def F(x: np.ndarray) -> Tuple[np.ndarray, float]:
                samples = residual(HoloTrace(x), p, M, denominator_floor=options.denominator_floor)
                return project(samples, N), float(np.max(np.abs(samples.values)))

            def J(x: np.ndarray) -> np.ndarray:
                return jacobian(HoloTrace(x), p, M, step=options.fd_step,
                                denominator_floor=options.denominator_floor)

            can_escalate = options.escalate and 2 * N <= options.n_max
            try:
                outcome = damped_newton(F, J, trace.coeffs, options.newton_tol, options.max_newton_iters,
                                        options.damping_factor, options.max_halvings)
            except NoConvergenceError as e:
                heavy = _heavy_tail(trace, options)
                if can_escalate and (e.details.get("stalled") or heavy):
                    escalations += 1
                    total_iterations += int(e.details.get("iterations", 0))
                    logger.info(f"Escalating truncation {N} -> {2 * N} after: {e.message}")
                    trace = trace.resized(2 * N)
                    continue
                raise

            total_iterations += outcome.iterations
            result = HoloTrace(outcome.x)
            if can_escalate and _heavy_tail(result, options):
                escalations += 1
                logger.info(
                    f"Escalating truncation {N} -> {2 * N}: tail energy ratio "
                    f"{result.tail_energy_ratio():.3e}"
                )
                trace = result.resized(2 * N)
                continue
            break

        solution = assess_solution(
            result, p, options,
            diagnostics={"iterations": float(total_iterations), "escalations": float(escalations)},
        )
        if not solution.residual_norm < options.newton_tol:
            raise NoConvergenceError(
                f"Independent residual check failed: {solution.residual_norm:.3e}",
                details={"residual_norm": solution.residual_norm},
            )
    except WaveSolverError as e:
        if tracker is not None:
            tracker.record_solve(stage, getattr(p, "a", float("nan")), total_iterations, False,
                                 time.perf_counter() - start, error=e.reason)
        raise

    if tracker is not None:
        tracker.record_solve(stage, getattr(p, "a", float("nan")), total_iterations, True,
                             time.perf_counter() - start, solution.residual_norm)
    return solution

"""
Command implementations: exact, solve, continue, events and critlayer
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from vorticity_waves.cli import storage
from vorticity_waves.critlayer.contour import (
    trace_and_classify,
    trace_contour,
    vertical_tangents,
    window_half_width,
)
from vorticity_waves.critlayer.stream import f_field, flux_constant, stream_extension
from vorticity_waves.errors import ConfigError, NoVerticalTangentError, StalledBranchError
from vorticity_waves.geometry.profile import assess_solution, solution_curve
from vorticity_waves.model.parameters import exact_solution, laminar_trace
from vorticity_waves.models.schemas import AnyParams, CritReport, CritSide, GeneralParams, Params, RunConfig
from vorticity_waves.solver.branch import TOUCH
from vorticity_waves.solver.continuation import branch_from_bifurcation, continue_branch
from vorticity_waves.solver.events import locate_event
from vorticity_waves.solver.newton import newton_solve
from vorticity_waves.solver.tracking import SolveTracker

logger = logging.getLogger(__name__)

DEFAULT_BETA_WINDOW = (-2.0, 0.0)


def _config_payload(cfg: RunConfig) -> Dict[str, Any]:
    return cfg.model_dump(mode="json")


def _out_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def make_params(cfg: RunConfig, a: Optional[float] = None) -> AnyParams:
    """Params from (G, a, l), or GeneralParams when omega and B are given"""
    if cfg.omega is not None or cfg.bernoulli is not None:
        if cfg.omega is None or cfg.bernoulli is None:
            raise ConfigError("General parameters need both --omega and --bernoulli")
        d = None if cfg.l == 0.0 else 1.0 / (cfg.l * cfg.l)
        return GeneralParams(omega=cfg.omega, bernoulli=cfg.bernoulli, G=cfg.G, d=d)
    a = cfg.a if a is None else a
    if a is None:
        raise ConfigError(f"'{cfg.command}' needs --a (or --omega and --bernoulli)")
    return Params(G=cfg.G, a=a, l=cfg.l)


def cmd_exact(cfg: RunConfig) -> int:
    """Write the zero-gravity deep-water Solution of the family"""
    if cfg.a is None:
        raise ConfigError("'exact' needs --a")
    if cfg.G != 0.0 or cfg.l != 0.0:
        logger.warning("The exact family has G = 0 and infinite depth; ignoring --g and --l")
    params = Params(G=0.0, a=cfg.a, l=0.0)
    solution = assess_solution(exact_solution(cfg.a, cfg.n), params, cfg.options)
    out = _out_dir(cfg)
    storage.save_solution(solution, out / "solution.json", _config_payload(cfg))
    storage.write_profile_csv(solution, out / "profile.csv")
    logger.info(f"Exact solution a={cfg.a}: class {solution.wave_class.value}, residual {solution.residual_norm:.3e}")
    return 0


def cmd_solve(cfg: RunConfig) -> int:
    """Newton solve from an initial Solution file or from the laminar flow"""
    if cfg.initial:
        initial = storage.load_solution(cfg.initial, recompute=False)
        has_params = cfg.a is not None or cfg.omega is not None
        params = make_params(cfg) if has_params else initial.params
        t0 = initial.trace
    else:
        params = make_params(cfg)
        t0 = laminar_trace(params, cfg.n)
    tracker = SolveTracker(run_id="solve")
    solution = newton_solve(t0, params, cfg.options, tracker)
    out = _out_dir(cfg)
    storage.save_solution(solution, out / "solution.json", _config_payload(cfg))
    storage.write_profile_csv(solution, out / "profile.csv")
    return 0


def _start_solution(cfg: RunConfig, G: float):
    if cfg.initial:
        return storage.load_solution(cfg.initial, recompute=True, options=cfg.options)
    if cfg.a_start is None:
        raise ConfigError("'continue' needs --from-bifurcation, --initial or --a-start")
    if G != 0.0 or cfg.l != 0.0:
        raise ConfigError("--a-start without --initial is only available on the zero-gravity deep-water family")
    return assess_solution(exact_solution(cfg.a_start, cfg.n), Params(G=0.0, a=cfg.a_start, l=0.0), cfg.options)


def run_branch(cfg: RunConfig, G: float, out_name: str = "branch") -> Dict[str, Any]:
    """
    Compute and write one branch at gravity G

    Returns:
        The branch summary
    """
    target = TOUCH if cfg.a_end is None else cfg.a_end
    tracker = SolveTracker(run_id=f"{out_name}")
    out = _out_dir(cfg)
    try:
        if cfg.from_bifurcation:
            branch = branch_from_bifurcation(G, cfg.l, target, cfg.switch_amplitude, cfg.options, cfg.n, tracker)
        else:
            branch = continue_branch(_start_solution(cfg, G), target, cfg.options, tracker=tracker)
    except StalledBranchError as e:
        if e.branch is not None:
            storage.save_branch(e.branch, out / f"{out_name}.json", _config_payload(cfg))
            storage.write_summary_csv(e.branch, out / f"{out_name}_summary.csv")
        raise
    storage.save_branch(branch, out / f"{out_name}.json", _config_payload(cfg))
    storage.write_summary_csv(branch, out / f"{out_name}_summary.csv")
    return branch.summary


def _sweep_job(payload: Dict[str, Any]) -> Dict[str, Any]:
    cfg = RunConfig.model_validate(payload["config"])
    return run_branch(cfg, payload["G"], payload["name"])


def run_sweep(cfg: RunConfig) -> List[Dict[str, Any]]:
    """
    Independent branches for several gravities, one output file per branch

    Each worker owns its output files.
    """
    jobs = [
        {"config": _config_payload(cfg), "G": G, "name": f"branch_G{G:+.6g}"}
        for G in cfg.G_values
    ]
    if cfg.workers <= 1:
        return [_sweep_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_sweep_job, jobs))


def cmd_continue(cfg: RunConfig) -> int:
    if len(cfg.G_values) > 1:
        summaries = run_sweep(cfg)
        storage.write_json({"branches": summaries}, _out_dir(cfg) / "sweep.json")
        return 0
    G = cfg.G_values[0] if cfg.G_values else cfg.G
    run_branch(cfg, G)
    return 0


def cmd_events(cfg: RunConfig) -> int:
    """Refine the requested events on an existing Branch file"""
    if not cfg.branch:
        raise ConfigError("'events' needs --branch")
    branch = storage.load_branch(cfg.branch)
    tracker = SolveTracker(run_id="events")
    out = _out_dir(cfg)
    located = []
    for kind in cfg.kinds:
        value, solution = locate_event(branch, kind, cfg.options, tracker)
        storage.save_solution(solution, out / f"event_{kind.value}.json", _config_payload(cfg))
        located.append({
            "kind": kind.value,
            "value": value,
            "class": solution.wave_class.value,
            "min_x_slope": solution.diagnostics.get("min_x_slope"),
            "self_gap": solution.diagnostics.get("self_gap"),
        })
        logger.info(f"Event {kind.value} at a={value:.10f}")
    storage.write_json({"config": _config_payload(cfg), "events": located, "solves": tracker.summary()},
                       out / "events.json")
    return 0


def cmd_compute(cfg: RunConfig) -> int:
    """Dispatch exact / solve / continue / events"""
    handlers = {
        "exact": cmd_exact,
        "solve": cmd_solve,
        "continue": cmd_continue,
        "events": cmd_events,
    }
    if cfg.command not in handlers:
        raise ConfigError(f"Unknown compute command '{cfg.command}'")
    return handlers[cfg.command](cfg)


def cmd_critlayer(cfg: RunConfig) -> int:
    """
    F-field, traced contour and CritReport around a vertical tangent

    Without --alpha the first vertical tangent of the surface is used; a
    surface without one is a fault (exit 4). With --alpha at a point where
    x_alpha does not vanish, the field and contour are written and the
    report carries side "none".
    """
    if not cfg.solution:
        raise ConfigError("'critlayer' needs --solution")
    solution = storage.load_solution(cfg.solution, recompute=True, options=cfg.options)
    evaluator = stream_extension(solution)
    curve = solution_curve(solution)
    slope_tol = cfg.options.slope_tol

    alpha = cfg.alpha
    if alpha is None:
        found = vertical_tangents(curve, slope_tol)
        if not found:
            raise NoVerticalTangentError(
                "Surface has no vertical tangent; pass --alpha to sample a window anyway",
                details={"min_x_slope": solution.diagnostics.get("min_x_slope")},
            )
        alpha = found[0]

    vertical = abs(float(curve.x_derivative(alpha, 1)[0])) < slope_tol
    if vertical:
        report = trace_and_classify(evaluator, alpha, half_width=cfg.half_width, columns=cfg.columns,
                                    rows=cfg.rows, slope_tol=slope_tol)
        width = report.window_half_width
        beta_lo = report.diagnostics["beta_lo"] if cfg.beta_min is None else cfg.beta_min
        beta_hi = report.diagnostics["beta_hi"] if cfg.beta_max is None else cfg.beta_max
    else:
        width = cfg.half_width if cfg.half_width is not None else window_half_width(evaluator.gravity or 1.0)
        beta_lo = DEFAULT_BETA_WINDOW[0] if cfg.beta_min is None else cfg.beta_min
        beta_hi = min(DEFAULT_BETA_WINDOW[1], evaluator.beta_max) if cfg.beta_max is None else cfg.beta_max
        if not math.isinf(evaluator.depth):
            beta_lo = max(beta_lo, -evaluator.depth)
        report = CritReport(alpha_crit=float(alpha), k=1, side=CritSide.NONE, window_half_width=width,
                            diagnostics={"x_alpha": float(curve.x_derivative(alpha, 1)[0])})

    out = _out_dir(cfg)
    grid = f_field(evaluator, (alpha - width, alpha + width, beta_lo, beta_hi), (cfg.columns, cfg.rows))
    storage.write_field_csv(grid, out / "field.csv")
    contour = trace_contour(evaluator, alpha, width, (beta_lo, beta_hi), cfg.columns, cfg.rows)
    storage.write_contour_csv(contour, evaluator, out / "contour.csv")
    flux = flux_constant(evaluator)
    if flux is not None:
        report.diagnostics["flux"] = flux
    report.diagnostics["columns_traced"] = float(np.count_nonzero(contour.found))
    storage.write_json({"config": _config_payload(cfg), "report": report.model_dump(mode="json")},
                       out / "critreport.json")
    logger.info(f"Critical-layer report at alpha={alpha:.6f}: side {report.side.value}")
    return 0

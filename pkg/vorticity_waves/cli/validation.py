"""
Validation suite: closed-form and invariant checks at configurable truncation
"""
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from vorticity_waves.cli import storage
from vorticity_waves.config import settings
from vorticity_waves.critlayer.contour import trace_and_classify
from vorticity_waves.critlayer.stream import poisson_residual, stream_extension
from vorticity_waves.errors import ConfigError, WaveSolverError
from vorticity_waves.geometry.profile import assess_solution
from vorticity_waves.model.bifurcation import (
    bifurcation_coefficients,
    bifurcation_G,
    bifurcation_parameter,
    laminar_kernel,
    mode_one_multiplier,
)
from vorticity_waves.model.parameters import (
    A_CRIT,
    A_MAX,
    constants_of,
    exact_solution,
    laminar_multipliers,
    laminar_trace,
)
from vorticity_waves.model.residual import jacobian, residual, sup_norm, surface_terms
from vorticity_waves.models.schemas import CritSide, EventKind, Params, RunConfig, SolverOptions, WaveClass
from vorticity_waves.solver.branch import TOUCH
from vorticity_waves.solver.continuation import branch_from_bifurcation, branch_switch
from vorticity_waves.solver.events import refine_event
from vorticity_waves.spectral.trace import SampleGrid, node_angles
from vorticity_waves.spectral.transforms import coth_multipliers, grid_size, hilbert

logger = logging.getLogger(__name__)

# Added to the measured error of a check named by --perturb / WAVES_VALIDATE_PERTURB
PERTURBATION = 1.0

CheckFn = Callable[[RunConfig], Tuple[float, float, Dict[str, float]]]


@dataclass
class Check:
    name: str
    group: str
    run: CheckFn
    # Full branches to touching run only when selected by name or group
    default: bool = True


def _hilbert_cosines(cfg: RunConfig):
    """H cos(n alpha) = coth(nd) sin(n alpha) for deep and finite depth"""
    M = 64
    alphas = node_angles(M)
    worst = 0.0
    for d in (math.inf, 25.0, 1.0):
        coth = coth_multipliers(M // 2, d)
        for n in range(1, M // 2):
            out = hilbert(SampleGrid(np.cos(n * alphas)), d).values
            worst = max(worst, float(np.max(np.abs(out - coth[n] * np.sin(n * alphas)))))
    return worst, 1e-12, {"grid": float(M)}


def _hilbert_square(cfg: RunConfig):
    """H^2 = -I on mean-zero band-limited samples in deep water"""
    rng = np.random.default_rng(cfg.seed)
    M = 64
    spectrum = np.zeros(M // 2 + 1, dtype=complex)
    spectrum[1:M // 2] = rng.normal(size=M // 2 - 1) + 1j * rng.normal(size=M // 2 - 1)
    f = SampleGrid(np.fft.irfft(spectrum, n=M, norm="forward"))
    twice = hilbert(hilbert(f))
    return float(np.max(np.abs(twice.values + f.values))), 1e-12, {}


def _exact_residual(cfg: RunConfig):
    """
    Zero-gravity family against the surface equation, relative to the size of
    its terms. a = 0.3 lies past touching; the family stops at a = 1/3 where
    omega and B blow up, so a = 0.4 is out of reach.
    """
    worst = 0.0
    detail = {}
    for a, N in ((0.05, 64), (0.1, 64), (0.2, 64), (0.3, 128)):
        p = Params(G=0.0, a=a, l=0.0)
        t = exact_solution(a, N)
        const = constants_of(p)
        error = sup_norm(residual(t, p))
        scale = const.bernoulli * float(np.max(surface_terms(t, const, grid_size(N)).denominator))
        detail[f"sup_norm_{a}"] = error
        worst = max(worst, error / scale)
    return worst, 1e-13, detail


def _laminar_residual(cfg: RunConfig):
    worst = 0.0
    for G in np.linspace(-0.1, 0.1, 5):
        for a in np.linspace(0.0, 0.3, 5):
            for l in (0.0, 0.2, 0.3):
                p = Params(G=float(G), a=float(a), l=l)
                worst = max(worst, sup_norm(residual(laminar_trace(p, 8), p)))
    return worst, 1e-13, {"points": 75.0}


def _laminar_multiplier(cfg: RunConfig):
    """lambda_1 = G at a = 0 in deep water"""
    worst = 0.0
    for G in (-0.2, 0.0, 0.3):
        worst = max(worst, abs(mode_one_multiplier(G, 0.0, 0.0) - G))
    return worst, 1e-12, {}


def _laminar_jacobian(cfg: RunConfig):
    """Finite-difference Jacobian at a laminar flow against the analytic diagonal"""
    p = Params(G=0.1, a=0.05, l=0.2)
    N = 16
    t = laminar_trace(p, N)
    fd = jacobian(t, p, method="fd")
    diag = np.diag(laminar_multipliers(p, N))
    return float(np.max(np.abs(fd - diag))), 1e-6, {}


def _bifurcation_curvature(cfg: RunConfig):
    coefficients = bifurcation_coefficients(0.0, 0.0)
    error = max(abs(coefficients.curvature - 0.125) / 0.125, abs(coefficients.transversality + 2.0) / 2.0)
    return error, 0.05, {"curvature": coefficients.curvature, "transversality": coefficients.transversality}


def _laminar_kernel(cfg: RunConfig):
    """cos(alpha) spans the Jacobian kernel at the bifurcation points"""
    worst_sigma, worst_alignment = 0.0, 1.0
    for a in (0.0, 0.05):
        for l in (0.0, 0.2):
            sigma, alignment = laminar_kernel(a, l)
            worst_sigma = max(worst_sigma, sigma)
            worst_alignment = min(worst_alignment, alignment)
    error = max(worst_sigma, abs(bifurcation_G(0.0)), max(0.0, 0.999 - worst_alignment))
    return error, 1e-6, {"sigma_min": worst_sigma, "alignment": worst_alignment}


def _square_root_law(cfg: RunConfig):
    """Log-log slope of the cos(alpha) amplitude against a - a_bif over one decade"""
    G = 0.01
    a_bif = bifurcation_parameter(G)
    N = min(cfg.n, 64)
    amplitudes = np.geomspace(0.02, 0.02 * math.sqrt(10.0), 4)
    offsets = [abs(branch_switch(a_bif, G, 0.0, s, N=N).a - a_bif) for s in amplitudes]
    slope, _ = np.polyfit(np.log(offsets), np.log(amplitudes), 1)
    return abs(slope - 0.5), 0.05, {"slope": float(slope), "a_bif": a_bif}


def _touching_branch(G: float, expected: CritSide) -> CheckFn:
    """
    Branch from the laminar flow to touching through a breaking point whose
    critical layer sits on the expected side
    """

    def check(cfg: RunConfig):
        branch = branch_from_bifurcation(G, 0.0, TOUCH, options=cfg.options, N=cfg.n)
        final_gap = branch.points[-1].diagnostics.get("self_gap", math.inf)
        wrong = float(branch.status != "touching") + float(not final_gap < 1e-3)
        detail = {"final_gap": final_gap, "a_final": branch.points[-1].a}
        breaking = branch.events_of(EventKind.BREAKING)
        if not breaking:
            return wrong + 1.0, 0.5, detail
        event = breaking[0]
        detail["a_breaking"] = event.value
        detail["min_x_slope"] = event.solution.diagnostics["min_x_slope"]
        wrong += float(not abs(event.solution.diagnostics["min_x_slope"]) < 1e-6)
        report = trace_and_classify(stream_extension(event.solution))
        wrong += float(report.side != expected)
        if report.relative_mismatch is not None:
            detail["kappa_mismatch"] = report.relative_mismatch
            wrong += float(not report.relative_mismatch < 0.1)
        return wrong, 0.5, detail

    return check


def _geometry_classes(cfg: RunConfig):
    expected = {0.05: WaveClass.REGULAR, 0.19: WaveClass.OVERHANGING, 0.30: WaveClass.INVALID}
    wrong = 0.0
    for a, wave_class in expected.items():
        s = assess_solution(exact_solution(a, min(cfg.n, 128)), Params(G=0.0, a=a, l=0.0))
        if s.wave_class != wave_class:
            wrong += 1.0
    return wrong, 0.5, {}


def _breaking_threshold(cfg: RunConfig):
    options = SolverOptions.from_settings()
    N = min(cfg.n, 64)
    lo, hi = (assess_solution(exact_solution(a, N), Params(G=0.0, a=a, l=0.0), options) for a in (0.16, 0.18))
    value, _ = refine_event(lo, hi, EventKind.BREAKING, options)
    return abs(value - A_CRIT), 1e-6, {"a_star": value}


def _touching_threshold(cfg: RunConfig):
    """Exact profiles on both sides of the touching parameter"""
    below = assess_solution(exact_solution(A_MAX - 2e-3, 64), Params(G=0.0, a=A_MAX - 2e-3, l=0.0))
    above = assess_solution(exact_solution(A_MAX + 2e-3, 64), Params(G=0.0, a=A_MAX + 2e-3, l=0.0))
    wrong = float(below.wave_class == WaveClass.INVALID) + float(above.wave_class != WaveClass.INVALID)
    return wrong, 0.5, {"gap_below": below.diagnostics["self_gap"]}


def _stream_surface(cfg: RunConfig):
    s = assess_solution(exact_solution(0.2, 64), Params(G=0.0, a=0.2, l=0.0))
    e = stream_extension(s)
    values = e.psi(node_angles(128), 0.0)
    return float(np.max(np.abs(values))), 1e-12, {}


def _stream_poisson(cfg: RunConfig):
    s = assess_solution(exact_solution(0.2, 64), Params(G=0.0, a=0.2, l=0.0))
    e = stream_extension(s)
    return poisson_residual(e, (-0.3, -0.6, -1.0)), 1e-6, {}


CHECKS: List[Check] = [
    Check("hilbert_cosines", "hilbert", _hilbert_cosines),
    Check("hilbert_square", "hilbert", _hilbert_square),
    Check("exact_residual", "model", _exact_residual),
    Check("laminar_residual", "model", _laminar_residual),
    Check("laminar_multiplier", "model", _laminar_multiplier),
    Check("laminar_jacobian", "model", _laminar_jacobian),
    Check("bifurcation_curvature", "bifurcation", _bifurcation_curvature),
    Check("laminar_kernel", "bifurcation", _laminar_kernel),
    Check("square_root_law", "bifurcation", _square_root_law),
    Check("geometry_classes", "geometry", _geometry_classes),
    Check("breaking_threshold", "events", _breaking_threshold),
    Check("touching_threshold", "events", _touching_threshold),
    Check("stream_surface", "critlayer", _stream_surface),
    Check("stream_poisson", "critlayer", _stream_poisson),
    Check("touching_branch_positive", "branch", _touching_branch(0.01, CritSide.ABOVE_SURFACE), default=False),
    Check("touching_branch_negative", "branch", _touching_branch(-0.01, CritSide.BELOW_SURFACE), default=False),
]


def select_checks(only: List[str]) -> List[Check]:
    if not only:
        return [check for check in CHECKS if check.default]
    known = {check.name for check in CHECKS} | {check.group for check in CHECKS}
    unknown = [name for name in only if name not in known]
    if unknown:
        raise ConfigError(f"Unknown validation checks: {', '.join(unknown)}", details={"known": sorted(known)})
    return [check for check in CHECKS if check.name in only or check.group in only]


def run_checks(cfg: RunConfig, perturb: Optional[str] = None) -> List[Dict[str, object]]:
    results = []
    for check in select_checks(cfg.only):
        start = time.perf_counter()
        try:
            error, tolerance, detail = check.run(cfg)
            fault = None
        except WaveSolverError as e:
            error, tolerance, detail, fault = math.inf, 0.0, {}, e.reason
        if perturb in (check.name, check.group):
            error += PERTURBATION
        passed = error <= tolerance
        results.append({
            "name": check.name,
            "group": check.group,
            "passed": passed,
            "error": error,
            "tolerance": tolerance,
            "detail": detail,
            "fault": fault,
            "duration": time.perf_counter() - start,
        })
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, f"Check {check.name}: {'pass' if passed else 'FAIL'} (error {error:.3e}, tol {tolerance:.1e})")
    return results


def cmd_validate(cfg: RunConfig) -> int:
    """Run the suite and write validation.json; exit 0 iff every check passes"""
    perturb = cfg.perturb or settings.validate_perturb
    results = run_checks(cfg, perturb)
    failed = [result["name"] for result in results if not result["passed"]]
    storage.write_json(
        {"status": "pass" if not failed else "fail", "failed": failed, "checks": results},
        Path(cfg.out) / "validation.json",
    )
    if failed:
        logger.error(f"Validation failed: {', '.join(failed)}")
        return 1
    return 0

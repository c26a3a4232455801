"""
Physical wave profile reconstruction and classification
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from vorticity_waves.geometry.intersection import GapResult, self_gap
from vorticity_waves.model.parameters import constants_of
from vorticity_waves.model.residual import residual, sup_norm
from vorticity_waves.model.solution import Solution
from vorticity_waves.models.schemas import AnyParams, ProfileReport, SolverOptions, WaveClass
from vorticity_waves.spectral.trace import HoloTrace, node_angles
from vorticity_waves.spectral.transforms import (
    COS,
    SIN,
    coth_multipliers,
    evaluate_series,
    grid_size,
    synthesize,
)

logger = logging.getLogger(__name__)


@dataclass
class SurfaceCurve:
    """
    Samples of z(alpha) = alpha + x_w(alpha) + i y(alpha) on one period.

    ``x_coeffs`` are the sine coefficients of x - alpha and ``y_coeffs`` the
    cosine coefficients of y, kept for exact evaluation off the grid.
    """
    alphas: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    x_slopes: np.ndarray
    y_slopes: np.ndarray
    z_slope_moduli: np.ndarray
    x_coeffs: np.ndarray
    y_coeffs: np.ndarray

    @property
    def M(self) -> int:
        return self.alphas.size

    def point(self, alpha: float) -> Tuple[float, float]:
        x = alpha + float(evaluate_series(self.x_coeffs, alpha, SIN)[0])
        y = float(evaluate_series(self.y_coeffs, alpha, COS)[0])
        return x, y

    def x_derivative(self, alpha, order: int = 1) -> np.ndarray:
        """order-th alpha-derivative of x at arbitrary points"""
        values = evaluate_series(self.x_coeffs, alpha, SIN, order)
        if order == 1:
            values = values + 1.0
        return values

    def y_derivative(self, alpha, order: int = 1) -> np.ndarray:
        return evaluate_series(self.y_coeffs, alpha, COS, order)


def curve_size(N: int, oversample: int = 8) -> int:
    return max(256, grid_size(N, oversample))


def surface_curve(t: HoloTrace, depth: float = math.inf, M: Optional[int] = None, oversample: int = 8) -> SurfaceCurve:
    """
    Sample the physical profile of a trace

    Args:
        t: Trace
        depth: Conformal depth (inf for deep water)
        M: Number of samples (default: power of two >= oversample * N)
        oversample: Oversampling factor when M is not given

    Returns:
        SurfaceCurve
    """
    if M is None:
        M = curve_size(t.N, oversample)
    b = t.coeffs
    n = np.arange(b.size, dtype=float)
    x_coeffs = b * coth_multipliers(t.N, depth)
    alphas = node_angles(M)
    xs = alphas + synthesize(x_coeffs, M, SIN)
    ys = synthesize(b, M, COS)
    x_slopes = 1.0 + synthesize(n * x_coeffs, M, COS)
    y_slopes = synthesize(-n * b, M, SIN)
    return SurfaceCurve(
        alphas=alphas,
        xs=xs,
        ys=ys,
        x_slopes=x_slopes,
        y_slopes=y_slopes,
        z_slope_moduli=np.hypot(x_slopes, y_slopes),
        x_coeffs=x_coeffs,
        y_coeffs=b.copy(),
    )


def solution_curve(s: Solution, M: Optional[int] = None, oversample: int = 8) -> SurfaceCurve:
    return surface_curve(s.trace, constants_of(s.params).depth, M, oversample)


def min_x_slope(c: SurfaceCurve) -> Tuple[float, float]:
    """
    Minimum of x_alpha, refined off the grid

    Returns:
        (min x_alpha, alpha at the minimum) with alpha in [0, pi]
    """
    j = int(np.argmin(c.x_slopes))
    step = 2.0 * np.pi / c.M
    centre = float(c.alphas[j])
    result = minimize_scalar(
        lambda alpha: float(c.x_derivative(alpha, 1)[0]),
        bounds=(centre - step, centre + step),
        method="bounded",
        options={"xatol": 1e-13},
    )
    value, where = float(c.x_slopes[j]), centre
    if result.success and result.fun <= value:
        value, where = float(result.fun), float(result.x)
    where = math.remainder(where, 2.0 * math.pi)
    return value, abs(where)


def classify(c: SurfaceCurve, options: Optional[SolverOptions] = None, gap: Optional[GapResult] = None,
             laminar: bool = False) -> WaveClass:
    """
    Classification by the sign of x_alpha and the closest self-approach

    Invalid when the curve crosses itself, touching when the gap is below
    gap_tol, then overhanging / breaking / regular from min x_alpha.
    """
    options = options or SolverOptions()
    if laminar:
        return WaveClass.LAMINAR
    if gap is None:
        gap = self_gap(c.alphas, c.xs, c.ys, c.z_slope_moduli, options.guard_band, c.point)
    if gap.crosses:
        return WaveClass.INVALID
    if gap.gap < options.gap_tol:
        return WaveClass.TOUCHING
    slope, _ = min_x_slope(c)
    if slope > options.slope_tol:
        return WaveClass.REGULAR
    if slope >= -options.slope_tol:
        return WaveClass.BREAKING
    return WaveClass.OVERHANGING


def depth_and_validity(t: HoloTrace, params: AnyParams, c: Optional[SurfaceCurve] = None,
                       gap: Optional[GapResult] = None, options: Optional[SolverOptions] = None
                       ) -> Tuple[Optional[float], bool, float]:
    """
    Physical depth, injectivity and the smallest |z_alpha|

    H = d - b_0 because the bottom is the image of beta = -d, the line
    y = b_0 - d. Deep water reports H as None.
    """
    options = options or SolverOptions()
    depth = constants_of(params).depth
    if c is None:
        c = surface_curve(t, depth, oversample=options.geometry_oversample)
    if gap is None:
        gap = self_gap(c.alphas, c.xs, c.ys, c.z_slope_moduli, options.guard_band, c.point)
    H = None if math.isinf(depth) else depth - float(t.coeffs[0])
    smallest = float(np.min(c.z_slope_moduli))
    if smallest < options.stagnation_floor:
        logger.warning(f"Stagnation at the surface: min |z_alpha| = {smallest:.3e}")
    return H, not gap.crosses, smallest


def profile_report(t: HoloTrace, params: AnyParams, options: Optional[SolverOptions] = None,
                   M: Optional[int] = None) -> ProfileReport:
    """Full geometric report of a trace"""
    options = options or SolverOptions()
    depth = constants_of(params).depth
    c = surface_curve(t, depth, M, options.geometry_oversample)
    laminar = t.is_constant(atol=1e-14)
    gap = self_gap(c.alphas, c.xs, c.ys, c.z_slope_moduli, options.guard_band, c.point)
    wave_class = classify(c, options, gap, laminar)
    slope, where = min_x_slope(c)
    H, injective, smallest = depth_and_validity(t, params, c, gap, options)
    return ProfileReport(
        wave_class=wave_class,
        min_x_slope=slope,
        alpha_crit=where if slope <= options.slope_tol else None,
        self_gap=gap.gap,
        gap_pair=gap.pair,
        bubble_area=gap.bubble_area,
        depth_H=H,
        injective=injective,
        min_z_slope_modulus=smallest,
    )


def breaking_derivatives(c: SurfaceCurve, alpha_crit: float, max_order: int = 6) -> np.ndarray:
    """x_alpha, x_alpha_alpha, ... at alpha_crit (orders 1..max_order)"""
    return np.array([float(c.x_derivative(alpha_crit, k)[0]) for k in range(1, max_order + 1)])


def assess_solution(t: HoloTrace, params: AnyParams, options: Optional[SolverOptions] = None,
                    diagnostics: Optional[dict] = None) -> Solution:
    """
    Build a Solution: residual sup-norm recomputed on the dealiased grid,
    geometry classified on the oversampled curve
    """
    options = options or SolverOptions()
    samples = residual(t, params, dealias_factor=options.dealias_factor,
                       denominator_floor=options.denominator_floor)
    report = profile_report(t, params, options)
    info = {
        "min_x_slope": report.min_x_slope,
        "self_gap": report.self_gap,
        "depth_H": report.depth_H if report.depth_H is not None else math.inf,
        "min_z_slope_modulus": report.min_z_slope_modulus,
        "tail_energy_ratio": t.tail_energy_ratio(),
        "stagnation_warning": 1.0 if report.min_z_slope_modulus < options.stagnation_floor else 0.0,
    }
    if report.bubble_area is not None:
        info["bubble_area"] = report.bubble_area
    if diagnostics:
        info.update(diagnostics)
    return Solution(
        trace=t,
        params=params,
        residual_norm=sup_norm(samples),
        wave_class=report.wave_class,
        diagnostics=info,
        profile=report,
    )

"""
Zero contour of F near a vertical-tangent surface point and its classification
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from vorticity_waves.config import settings
from vorticity_waves.critlayer.stream import StreamEvaluator, f_field
from vorticity_waves.errors import (
    NoVerticalTangentError,
    ParameterError,
    StagnationError,
)
from vorticity_waves.geometry.profile import (
    SurfaceCurve,
    breaking_derivatives,
    min_x_slope,
    solution_curve,
)
from vorticity_waves.models.schemas import CritReport, CritSide

logger = logging.getLogger(__name__)

ORDER_TOL = 1e-6
MAX_ORDER = 8
STAGNATION_TOL = 1e-6


@dataclass
class Contour:
    """Per-column roots of F; NaN where a column has no root in the window"""
    alphas: np.ndarray
    betas: np.ndarray
    beta_window: Tuple[float, float]

    @property
    def found(self) -> np.ndarray:
        return np.isfinite(self.betas)


def vertical_tangents(c: SurfaceCurve, slope_tol: float) -> List[float]:
    """
    Parameters in [0, pi] where x_alpha vanishes

    A minimum of x_alpha within slope_tol of zero counts as one (breaking)
    point; otherwise the sign changes of x_alpha are refined by brentq.
    """
    slope, where = min_x_slope(c)
    if abs(slope) <= slope_tol:
        return [where]
    if slope > slope_tol:
        return []
    upper = c.alphas <= np.pi
    alphas = c.alphas[upper]
    values = c.x_slopes[upper]
    roots = []
    for i in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0.0)[0]:
        roots.append(brentq(lambda alpha: float(c.x_derivative(alpha, 1)[0]),
                            float(alphas[i]), float(alphas[i + 1]), xtol=1e-14))
    return roots


def derivative_order(c: SurfaceCurve, alpha_crit: float) -> Tuple[int, np.ndarray]:
    """
    Order k of the first alpha-derivative of x beyond x_alpha exceeding 1e-6 at alpha_crit

    Returns:
        (k, derivatives of orders 1..MAX_ORDER)
    """
    derivatives = breaking_derivatives(c, alpha_crit, MAX_ORDER)
    for order in range(2, MAX_ORDER + 1):
        if abs(derivatives[order - 1]) > ORDER_TOL:
            return order, derivatives
    raise ParameterError(
        f"x has no derivative above {ORDER_TOL} up to order {MAX_ORDER} at alpha={alpha_crit}",
        details={"alpha_crit": alpha_crit},
    )


def predicted_coefficient(e: StreamEvaluator, alpha_crit: float, k: int, x_k: float, G: float) -> float:
    """
    Leading coefficient of beta ~ kappa (alpha - alpha_crit)^(k-1) from surface data

    kappa = 2 (B - G y) x^(k) / ((k-1)! y_alpha^2 G)
    """
    geo = e.surface_map(np.array([alpha_crit]), 0.0)
    y = float(geo["y"][0])
    y_alpha = float(geo["y_alpha"][0])
    head = e.bernoulli - G * y
    return 2.0 * head * x_k / (math.factorial(k - 1) * y_alpha ** 2 * G)


def window_half_width(G: float, half_width: Optional[float] = None) -> float:
    if half_width is not None:
        return half_width
    return min(settings.crit_half_width, settings.crit_gravity_scale * abs(G))


def trace_contour(
    e: StreamEvaluator,
    alpha_centre: float,
    half_width: float,
    beta_window: Tuple[float, float],
    columns: int = 400,
    rows: int = 200,
) -> Contour:
    """
    Per-column root of F in beta, the root closest to the surface when there are several

    The field is sampled on a (rows x columns) grid to bracket sign changes,
    then every bracket nearest beta = 0 is refined with brentq.
    """
    beta_lo, beta_hi = beta_window
    grid = f_field(e, (alpha_centre - half_width, alpha_centre + half_width, beta_lo, beta_hi), (columns, rows))
    roots = np.full(columns, np.nan)
    for j, alpha in enumerate(grid.alphas):
        column = grid.values[:, j]
        exact = np.nonzero(column == 0.0)[0]
        brackets = np.nonzero(column[:-1] * column[1:] < 0.0)[0]
        candidates = [float(grid.betas[i]) for i in exact]
        for i in brackets:
            candidates.append(brentq(
                lambda beta, a=float(alpha): float(e.field(np.array([a]), beta)[0]),
                float(grid.betas[i]), float(grid.betas[i + 1]), xtol=1e-15, rtol=1e-13,
            ))
        if candidates:
            roots[j] = min(candidates, key=abs)
    return Contour(alphas=grid.alphas, betas=roots, beta_window=(beta_lo, beta_hi))


def _fit(u: np.ndarray, betas: np.ndarray, k: int) -> Tuple[float, Optional[float]]:
    """
    Leading coefficient of a polynomial fit in u with the u^(k-1) term and
    two higher orders (plus constant and lower nuisance terms), and the
    log-log exponent over the columns away from the centre
    """
    powers = list(range(0, k + 2))
    design = np.column_stack([u ** p for p in powers])
    coeffs, *_ = np.linalg.lstsq(design, betas, rcond=None)
    kappa = float(coeffs[powers.index(k - 1)])

    offset = float(coeffs[0])
    shifted = np.abs(betas - offset)
    mask = (np.abs(u) > 0.2 * np.max(np.abs(u))) & (shifted > 0.0)
    exponent = None
    if np.count_nonzero(mask) >= 4:
        slope, _ = np.polyfit(np.log(np.abs(u[mask])), np.log(shifted[mask]), 1)
        exponent = float(slope)
    return kappa, exponent


def trace_and_classify(
    e: StreamEvaluator,
    alpha_crit: Optional[float] = None,
    G: Optional[float] = None,
    half_width: Optional[float] = None,
    columns: Optional[int] = None,
    rows: Optional[int] = None,
    slope_tol: Optional[float] = None,
) -> CritReport:
    """
    Trace the critical layer near a vertical tangent and classify its side

    Args:
        e: Stream evaluator of a (breaking or overhanging) Solution
        alpha_crit: Vertical-tangent parameter (default: location of min x_alpha)
        G: Gravity (default: that of the Solution); must be nonzero
        half_width: Window half-width in alpha (default scales with |G|)
        columns: Contour columns
        rows: Sampling rows used to bracket roots
        slope_tol: Tolerance on |x_alpha(alpha_crit)|

    Returns:
        CritReport; side is none when no column carries a root
    """
    G = e.gravity if G is None else float(G)
    columns = columns or settings.crit_columns
    rows = rows or settings.crit_rows
    slope_tol = settings.slope_tol if slope_tol is None else slope_tol
    if G == 0.0:
        raise ParameterError("Critical-layer classification needs nonzero gravity")

    curve = solution_curve(e.solution)
    if alpha_crit is None:
        found = vertical_tangents(curve, slope_tol)
        if not found:
            raise NoVerticalTangentError("Surface has no vertical tangent")
        alpha_crit = found[0]
    x_alpha = float(curve.x_derivative(alpha_crit, 1)[0])
    if abs(x_alpha) >= slope_tol:
        raise NoVerticalTangentError(
            f"x_alpha = {x_alpha:.3e} at alpha={alpha_crit:.6f} exceeds slope_tol",
            details={"alpha_crit": alpha_crit, "x_alpha": x_alpha},
        )
    geo = e.surface_map(np.array([alpha_crit]), 0.0)
    speed = float(np.hypot(geo["x_alpha"][0], geo["y_alpha"][0]))
    if speed <= STAGNATION_TOL:
        raise StagnationError(
            f"|z_alpha| = {speed:.3e} at alpha={alpha_crit:.6f}",
            details={"alpha_crit": alpha_crit},
        )

    k, derivatives = derivative_order(curve, alpha_crit)
    kappa_pred = predicted_coefficient(e, alpha_crit, k, float(derivatives[k - 1]), G)
    width = window_half_width(G, half_width)

    span = max(4.0 * abs(kappa_pred) * width ** (k - 1), 1e-6)
    beta_lo = -span if math.isinf(e.depth) else max(-span, -e.depth)
    beta_hi = min(span, e.beta_max)
    contour = trace_contour(e, alpha_crit, width, (beta_lo, beta_hi), columns, rows)
    found = contour.found
    report = {
        "alpha_crit": float(alpha_crit),
        "k": k,
        "window_half_width": width,
        "predicted_coefficient": kappa_pred,
        "columns_with_root": int(np.count_nonzero(found)),
    }
    diagnostics = {
        "x_alpha": x_alpha,
        "x_derivative": float(derivatives[k - 1]),
        "beta_lo": beta_lo,
        "beta_hi": beta_hi,
        "beta_max": e.beta_max,
    }
    if np.count_nonzero(found) < k + 3:
        logger.info(f"No critical layer in the window around alpha={alpha_crit:.6f}")
        return CritReport(side=CritSide.NONE, diagnostics=diagnostics, **report)

    u = contour.alphas[found] - alpha_crit
    betas = contour.betas[found]
    kappa, exponent = _fit(u, betas, k)
    above = float(np.mean(betas > 0.0))
    diagnostics["fraction_above"] = above
    if k % 2 == 0:
        side = CritSide.CROSSING
    elif kappa > 0.0:
        side = CritSide.ABOVE_SURFACE
    else:
        side = CritSide.BELOW_SURFACE
    mismatch = abs(kappa - kappa_pred) / abs(kappa) if kappa != 0.0 else math.inf
    logger.info(
        f"Critical layer at alpha={alpha_crit:.6f}: k={k}, side {side.value}, "
        f"kappa={kappa:.6g} (predicted {kappa_pred:.6g})"
    )
    return CritReport(
        side=side,
        fitted_exponent=exponent,
        fitted_coefficient=kappa,
        relative_mismatch=mismatch,
        diagnostics=diagnostics,
        **report,
    )


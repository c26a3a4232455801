"""
Bifurcation from the laminar family

The first cosine mode becomes neutral where lambda_1(G; a, l) = 0. The root in
G is G~(a, l); the root in a at fixed G is the branch-switching point used by
the continuation engine. Transversality and curvature of the bifurcating
branch are computed by finite differences of the projected residual along
the Lyapunov-Schmidt reduction onto cos(alpha).
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import svd
from scipy.optimize import brentq

from vorticity_waves.config import settings
from vorticity_waves.errors import (
    BifurcationNotFoundError,
    DegenerateBifurcationError,
    WaveSolverError,
)
from vorticity_waves.model.parameters import derive_parameters, laminar, laminar_multipliers
from vorticity_waves.model.residual import jacobian, residual, residual_vector
from vorticity_waves.models.schemas import Params
from vorticity_waves.spectral.trace import HoloTrace, SampleGrid
from vorticity_waves.spectral.transforms import grid_size

logger = logging.getLogger(__name__)

REDUCTION_ORDER = 16


def mode_one_multiplier(G: float, a: float, l: float = 0.0) -> float:
    """lambda_1 at the laminar flow of (G, a, l)"""
    return float(laminar_multipliers(Params(G=G, a=a, l=l), 1)[1])


def _find_root(func, lo: float, hi: float, samples: int, centre: float, what: str) -> float:
    grid = np.linspace(lo, hi, samples + 1)
    values = []
    for point in grid:
        try:
            values.append(func(point))
        except WaveSolverError:
            values.append(np.nan)
    values = np.asarray(values)

    brackets = []
    for i in range(samples):
        left, right = values[i], values[i + 1]
        if not (np.isfinite(left) and np.isfinite(right)):
            continue
        if left == 0.0:
            return float(grid[i])
        if left * right < 0.0:
            brackets.append((grid[i], grid[i + 1]))
    if values.size and values[-1] == 0.0:
        return float(grid[-1])
    if not brackets:
        raise BifurcationNotFoundError(
            f"No sign change of lambda_1 for {what} in [{lo}, {hi}]",
            details={"bracket": [lo, hi]},
        )
    left, right = min(brackets, key=lambda br: abs(0.5 * (br[0] + br[1]) - centre))
    return float(brentq(func, left, right, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


def bifurcation_G(a: float, l: float = 0.0, bracket: Optional[Tuple[float, float]] = None,
                  samples: int = 200) -> float:
    """
    Gravity at which cos(alpha) spans the kernel at the laminar flow

    Args:
        a: Family parameter
        l: Depth parameter
        bracket: Search interval in G
        samples: Scan resolution used to bracket the root

    Returns:
        G~(a, l)
    """
    if bracket is None:
        bracket = settings.bifurcation_bracket
    lo, hi = bracket
    root = _find_root(lambda G: mode_one_multiplier(G, a, l), lo, hi, samples, 0.0, f"a={a}, l={l}")
    logger.debug(f"Bifurcation gravity for a={a}, l={l}: {root:.12e}")
    return root


def bifurcation_parameter(G: float, l: float = 0.0, bracket: Optional[Tuple[float, float]] = None,
                          samples: int = 400) -> float:
    """Family parameter a_bif with G~(a_bif, l) = G, the root closest to a = 0"""
    if bracket is None:
        bracket = settings.bifurcation_a_bracket
    lo, hi = bracket
    hi = min(hi, 1.0 / 3.0 - 1e-6)
    root = _find_root(lambda a: mode_one_multiplier(G, a, l), lo, hi, samples, 0.0, f"G={G}, l={l}")
    logger.info(f"Laminar branch for G={G}, l={l} bifurcates at a={root:.12e}")
    return root


def laminar_kernel(a: float, l: float = 0.0, N: int = REDUCTION_ORDER) -> Tuple[float, float]:
    """
    Smallest singular value of the Jacobian at the laminar flow of (G~(a, l), a, l)
    and the cos(alpha) component of its right singular vector
    """
    G = bifurcation_G(a, l)
    p = Params(G=G, a=a, l=l)
    _, sigma, vt = svd(jacobian(HoloTrace.constant(laminar(G, a), N), p))
    return float(sigma[-1]), float(abs(vt[-1, 1]))


@dataclass
class BifurcationCoefficients:
    """Numerical and closed-form data of a bifurcation point"""
    a: float
    l: float
    G: float
    level: float
    transversality: float
    curvature: float
    closed_form: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, float]:
        data = {
            "a": self.a,
            "l": self.l,
            "G": self.G,
            "level": self.level,
            "transversality": self.transversality,
            "curvature": self.curvature,
        }
        data.update({f"closed_form_{k}": v for k, v in self.closed_form.items()})
        return data


def closed_form_coefficients(a: float) -> Dict[str, float]:
    """
    Leading-order closed forms at l = 0: transversality -2, curvature
    (omega - 2)^2 / 2, and the coefficients of the displayed second-variation
    field omega - 4 omega cos^2 + 4 cos^2 - 1 (constant, cos^2 alpha).
    """
    omega, _ = derive_parameters(a)
    return {
        "transversality": -2.0,
        "curvature": 0.5 * (omega - 2.0) ** 2,
        "second_variation_constant": omega - 1.0,
        "second_variation_cos2": 4.0 - 4.0 * omega,
    }


def second_variation_field(a: float, alphas: np.ndarray, G: Optional[float] = None) -> np.ndarray:
    """
    Second variation of the residual along cos(alpha) at the deep-water
    bifurcation point: (omega - 2q)^2 cos^2(alpha) - G with q = 1 + omega c.
    """
    if G is None:
        G = bifurcation_G(a, 0.0)
    omega, _ = derive_parameters(a)
    q = 1.0 + omega * laminar(G, a)
    return (omega - 2.0 * q) ** 2 * np.cos(alphas) ** 2 - G


def second_variation(a: float, l: float = 0.0, N: int = REDUCTION_ORDER, eps: float = 1e-4,
                     G: Optional[float] = None) -> SampleGrid:
    """Second difference of the residual samples along cos(alpha) at the bifurcation point"""
    if G is None:
        G = bifurcation_G(a, l)
    p = Params(G=G, a=a, l=l)
    M = grid_size(N)
    base = HoloTrace.constant(laminar(G, a), N)
    plus = base.coeffs.copy()
    minus = base.coeffs.copy()
    plus[1] += eps
    minus[1] -= eps
    values = (
        residual(HoloTrace(plus), p, M).values
        - 2.0 * residual(base, p, M).values
        + residual(HoloTrace(minus), p, M).values
    ) / eps ** 2
    return SampleGrid(values)


def bifurcation_coefficients(
    a: float,
    l: float = 0.0,
    N: int = REDUCTION_ORDER,
    G: Optional[float] = None,
    eps: float = 1e-3,
    eps3: float = 1e-2,
    h: float = 1e-4,
) -> BifurcationCoefficients:
    """
    Transversality and curvature of the branch bifurcating at (G~(a, l), a, l)

    The branch is v = s cos(alpha) + s^2 v2 + ..., a = a0 + a_ss s^2 / 2 + ...
    with a_ss = -(P F_vv[e1, x2] + P F_vvv[e1, e1, e1] / 3) / (P F_va e1),
    x2 = -J^+ F_vv[e1, e1] on the complement of cos(alpha) and P the
    cos(alpha) component.

    Args:
        a: Family parameter of the bifurcation point
        l: Depth parameter
        N: Truncation used for the reduction
        G: Gravity (default G~(a, l))
        eps: Step for second differences
        eps3: Step for the third difference
        h: Step in a for the mixed difference

    Returns:
        BifurcationCoefficients
    """
    if G is None:
        G = bifurcation_G(a, l)
    p = Params(G=G, a=a, l=l)
    M = grid_size(N)
    level = laminar(G, a)
    base = np.zeros(N + 1)
    base[0] = level
    e1 = np.zeros(N + 1)
    e1[1] = 1.0

    def F(offset: np.ndarray, params: Params = p, centre: np.ndarray = base) -> np.ndarray:
        return residual_vector(HoloTrace(centre + offset), params, M)

    # Transversality: d/da of the cos(alpha) response along the laminar family
    def mode_one_response(shift: float) -> float:
        shifted = p.with_a(a + shift)
        centre = np.zeros(N + 1)
        centre[0] = laminar(G, a + shift)
        return float(F(eps * e1, shifted, centre)[1] - F(-eps * e1, shifted, centre)[1])

    transversality = (mode_one_response(h) - mode_one_response(-h)) / (4.0 * eps * h)
    if abs(transversality) < 1e-3:
        raise DegenerateBifurcationError(
            f"Transversality {transversality:.3e} is too small at a={a}, l={l}",
            details={"transversality": transversality},
        )

    f0 = F(np.zeros(N + 1))
    second = (F(eps * e1) - 2.0 * f0 + F(-eps * e1)) / eps ** 2

    J = jacobian(HoloTrace(base), p, M)
    keep = [k for k in range(N + 1) if k != 1]
    x2 = np.zeros(N + 1)
    x2[keep] = np.linalg.solve(J[np.ix_(keep, keep)], -second[keep])

    mixed = (
        F(eps * (e1 + x2)) - F(eps * (e1 - x2)) - F(eps * (-e1 + x2)) + F(-eps * (e1 + x2))
    ) / (4.0 * eps ** 2)
    third = (
        F(2.0 * eps3 * e1) - 2.0 * F(eps3 * e1) + 2.0 * F(-eps3 * e1) - F(-2.0 * eps3 * e1)
    ) / (2.0 * eps3 ** 3)

    curvature = -(mixed[1] + third[1] / 3.0) / transversality
    closed = closed_form_coefficients(a) if l == 0.0 else {}
    logger.info(
        f"Bifurcation at a={a}, l={l}, G={G:.6e}: transversality={transversality:.6f}, "
        f"curvature={curvature:.6f}"
    )
    return BifurcationCoefficients(
        a=a, l=l, G=G, level=level,
        transversality=float(transversality),
        curvature=float(curvature),
        closed_form=closed,
    )

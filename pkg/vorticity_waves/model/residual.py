"""
Surface equation residual and its linearization

The residual is evaluated in polynomial form

    R = 1/2 (1 + omega (y + y H[y_a] - H[y y_a]))^2 - (B - G y) ((1 + H[y_a])^2 + y_a^2)

where H is the Hilbert transform on the strip of depth d and
(1 + H[y_a])^2 + y_a^2 = |z_alpha|^2. The rational form divides the first
term by |z_alpha|^2 instead of multiplying the second. Sign convention: with
this R the linearization at the origin (G = 0, a = 0, deep water) is the
diagonal -(k - 1) on cos(k alpha).
"""
import logging
from typing import NamedTuple, Optional

import numpy as np

from vorticity_waves.errors import DifferentiationError, OutsideUError, ParameterError, WaveSolverError
from vorticity_waves.model.parameters import ModelConstants, constants_of, laminar_level, laminar_multipliers
from vorticity_waves.models.schemas import AnyParams, Params
from vorticity_waves.spectral.trace import HoloTrace, SampleGrid
from vorticity_waves.spectral.transforms import (
    COS,
    SIN,
    analyze,
    coth_multipliers,
    dealiased_product,
    grid_size,
    hilbert,
    synthesize,
)

logger = logging.getLogger(__name__)

POLYNOMIAL = "polynomial"
RATIONAL = "rational"


class SurfaceTerms(NamedTuple):
    """Boundary quantities shared by the residual forms"""
    y: np.ndarray
    y_slope: np.ndarray
    x_slope: np.ndarray
    numerator: np.ndarray
    denominator: np.ndarray


def surface_terms(t: HoloTrace, const: ModelConstants, M: int) -> SurfaceTerms:
    b = t.coeffs
    n = np.arange(b.size, dtype=float)
    coth = coth_multipliers(t.N, const.depth)
    y = synthesize(b, M, COS)
    y_slope = synthesize(-n * b, M, SIN)
    h = synthesize(n * coth * b, M, COS)
    y_grid = SampleGrid(y)
    commutator = hilbert(dealiased_product(y_grid, SampleGrid(y_slope), n_modes=t.N), const.depth).values
    numerator = 1.0 + const.omega * (y + dealiased_product(y_grid, SampleGrid(h), n_modes=t.N).values - commutator)
    denominator = (1.0 + h) ** 2 + y_slope ** 2
    return SurfaceTerms(y, y_slope, 1.0 + h, numerator, denominator)


def residual(
    t: HoloTrace,
    p: AnyParams,
    M: Optional[int] = None,
    form: str = POLYNOMIAL,
    dealias_factor: int = 4,
    denominator_floor: float = 1e-10,
) -> SampleGrid:
    """
    Pointwise residual of the surface equation

    Args:
        t: Trace of the holomorphic perturbation
        p: Family or general parameters
        M: Grid size (default: power of two >= dealias_factor * N)
        form: "polynomial" (multiplied through by |z_alpha|^2) or "rational"
        dealias_factor: Oversampling used when M is not given
        denominator_floor: Smallest admissible |z_alpha|^2

    Returns:
        Residual samples on the M-node grid
    """
    if M is None:
        M = grid_size(t.N, dealias_factor)
    const = constants_of(p)
    terms = surface_terms(t, const, M)

    smallest = float(np.min(terms.denominator))
    if not np.isfinite(smallest) or smallest < denominator_floor:
        raise OutsideUError(
            f"|z_alpha|^2 drops to {smallest:.3e} on the boundary grid",
            details={"min_denominator": smallest},
        )

    bernoulli_term = const.bernoulli - const.gravity * terms.y
    if form == POLYNOMIAL:
        values = 0.5 * terms.numerator ** 2 - bernoulli_term * terms.denominator
    elif form == RATIONAL:
        values = 0.5 * terms.numerator ** 2 / terms.denominator - bernoulli_term
    else:
        raise ParameterError(f"Unknown residual form '{form}'")
    return SampleGrid(values)


def project(samples: SampleGrid, N: int) -> np.ndarray:
    """Cosine projection of residual samples onto modes 0..N"""
    cos_coeffs, _ = analyze(samples.values, N)
    return cos_coeffs


def sup_norm(samples: SampleGrid) -> float:
    return float(np.max(np.abs(samples.values)))


def residual_vector(t: HoloTrace, p: AnyParams, M: int, denominator_floor: float = 1e-10) -> np.ndarray:
    return project(residual(t, p, M, denominator_floor=denominator_floor), t.N)


def _is_laminar(t: HoloTrace, p: AnyParams) -> bool:
    if not t.is_constant():
        return False
    const = constants_of(p)
    try:
        level = laminar_level(const.omega, const.bernoulli, const.gravity)
    except WaveSolverError:
        return False
    return abs(t.coeffs[0] - level) <= 1e-12 * (1.0 + abs(level))


def jacobian(
    t: HoloTrace,
    p: AnyParams,
    M: Optional[int] = None,
    method: str = "auto",
    step: float = 1e-6,
    denominator_floor: float = 1e-10,
) -> np.ndarray:
    """
    Linearization of the projected residual on coefficient space

    Column k is the derivative in the direction cos(k alpha). The default is
    central finite differences with step ``step * (1 + max|b|)``; laminar
    traces use the analytic diagonal.

    Args:
        t: Linearization point
        p: Parameters
        M: Grid size
        method: "auto", "fd" or "analytic"
        step: Relative finite-difference step
        denominator_floor: Smallest admissible |z_alpha|^2

    Returns:
        (N+1) x (N+1) matrix
    """
    N = t.N
    if M is None:
        M = grid_size(N)

    if method == "analytic" or (method == "auto" and _is_laminar(t, p)):
        if not _is_laminar(t, p):
            raise DifferentiationError("Analytic linearization is only available at laminar traces")
        return np.diag(laminar_multipliers(p, N))
    if method not in ("auto", "fd"):
        raise ParameterError(f"Unknown jacobian method '{method}'")

    h = step * (1.0 + float(np.max(np.abs(t.coeffs))))
    matrix = np.empty((N + 1, N + 1))
    base = t.coeffs
    for k in range(N + 1):
        plus = base.copy()
        minus = base.copy()
        plus[k] += h
        minus[k] -= h
        forward = residual_vector(HoloTrace(plus), p, M, denominator_floor)
        backward = residual_vector(HoloTrace(minus), p, M, denominator_floor)
        matrix[:, k] = (forward - backward) / (2.0 * h)

    if not np.all(np.isfinite(matrix)):
        raise DifferentiationError("Finite-difference linearization produced non-finite entries")
    return matrix


def parameter_derivative(
    t: HoloTrace,
    p: Params,
    M: Optional[int] = None,
    step: float = 1e-6,
    denominator_floor: float = 1e-10,
) -> np.ndarray:
    """Central difference of the projected residual in the family parameter a"""
    if M is None:
        M = grid_size(t.N)
    h = step * (1.0 + abs(p.a))
    forward = residual_vector(t, p.with_a(p.a + h), M, denominator_floor)
    backward = residual_vector(t, p.with_a(p.a - h), M, denominator_floor)
    column = (forward - backward) / (2.0 * h)
    if not np.all(np.isfinite(column)):
        raise DifferentiationError("Parameter derivative produced non-finite entries")
    return column

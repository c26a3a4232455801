"""
Parameter families, laminar flows and the exact zero-gravity waves
"""
import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np

from vorticity_waves.errors import (
    DivergentSeriesError,
    NoLaminarError,
    ParameterError,
    SingularParameterError,
)
from vorticity_waves.models.schemas import AnyParams, GeneralParams
from vorticity_waves.spectral.cache import multiplier_cache
from vorticity_waves.spectral.trace import HoloTrace
from vorticity_waves.spectral.transforms import coth_multipliers

logger = logging.getLogger(__name__)

# Breaking and touching parameters of the zero-gravity family
A_CRIT = (math.sqrt(2.0) - 1.0) ** 2
A_MAX = 0.454670016452010 ** 2


class ModelConstants(NamedTuple):
    """Resolved constants entering the surface equation"""
    omega: float
    bernoulli: float
    gravity: float
    depth: float


def derive_parameters(a: float) -> Tuple[float, float]:
    """
    Vorticity and Bernoulli constant of the one-parameter family

    Args:
        a: Family parameter, a < 1/3

    Returns:
        (omega, B) with omega = (1-a)/(1-3a) and B = ((1+a)/(1-3a))^2 / 2
    """
    if a >= 1.0 / 3.0:
        raise SingularParameterError(f"Family parameter a={a} must be below 1/3")
    denom = 1.0 - 3.0 * a
    omega = (1.0 - a) / denom
    bernoulli = 0.5 * ((1.0 + a) / denom) ** 2
    return omega, bernoulli


def constants_of(p: AnyParams) -> ModelConstants:
    if isinstance(p, GeneralParams):
        return ModelConstants(p.omega, p.bernoulli, p.G, p.depth)
    omega, bernoulli = derive_parameters(p.a)
    return ModelConstants(omega, bernoulli, p.G, p.depth)


def laminar_level(omega: float, bernoulli: float, gravity: float) -> float:
    """
    Flat-surface level c solving (1 + omega c)^2 / 2 = B - G c ("+" branch)
    """
    if omega == 0.0:
        if gravity == 0.0:
            raise NoLaminarError("Irrotational zero-gravity flow has no isolated laminar level")
        return (bernoulli - 0.5) / gravity
    disc = gravity ** 2 + 2.0 * omega * gravity + 2.0 * bernoulli * omega ** 2
    if disc < 0.0:
        raise NoLaminarError(
            f"Negative discriminant {disc:.3e} for omega={omega}, B={bernoulli}, G={gravity}",
            details={"discriminant": disc},
        )
    return (-(omega + gravity) + math.sqrt(disc)) / omega ** 2


def laminar(G: float, a: float) -> float:
    """Imaginary value of the laminar constant for the (G, a) family"""
    omega, bernoulli = derive_parameters(a)
    return laminar_level(omega, bernoulli, G)


def laminar_trace(p: AnyParams, N: int) -> HoloTrace:
    c = constants_of(p)
    return HoloTrace.constant(laminar_level(c.omega, c.bernoulli, c.gravity), N)


def laminar_multipliers(p: AnyParams, n_max: int) -> np.ndarray:
    """
    Diagonal of the linearized surface operator at the laminar flow.

    lambda_0 = q*omega + G and lambda_k = (q*omega + G) - k coth(kd) q^2 with
    q = 1 + omega*c, for the cosine modes k = 1..n_max.
    """
    const = constants_of(p)
    level = laminar_level(const.omega, const.bernoulli, const.gravity)
    q = 1.0 + const.omega * level
    k = np.arange(n_max + 1, dtype=float)
    coth = coth_multipliers(n_max, const.depth)
    diag = (q * const.omega + const.gravity) - k * coth * q * q
    diag[0] = q * const.omega + const.gravity
    return diag


def _exact_order(r: float, floor: float = 1e-14) -> int:
    if r == 0.0:
        return 1
    return max(1, int(math.ceil(1.0 + math.log(floor) / math.log(r))))


def exact_solution(a: float, N: Optional[int] = None) -> HoloTrace:
    """
    Zero-gravity deep-water wave of the family.

    b_n = -4 (-1)^(n-1) a^(n/2) for n >= 1 and b_0 = 0.

    Args:
        a: Family parameter in [0, 1)
        N: Truncation order; by default the smallest order whose tail is
            below 1e-14 of the largest coefficient

    Returns:
        The trace
    """
    if a >= 1.0:
        raise DivergentSeriesError(f"Exact family diverges for a={a} >= 1")
    if a < 0.0:
        raise ParameterError(f"Exact family needs a >= 0, got {a}")
    r = math.sqrt(a)
    if N is None:
        N = _exact_order(r)

    def build() -> np.ndarray:
        n = np.arange(1, N + 1, dtype=float)
        coeffs = np.zeros(N + 1)
        coeffs[1:] = -4.0 * (-1.0) ** (n - 1) * r ** n
        return coeffs

    coeffs = multiplier_cache.get_or_build("exact", {"a": a, "N": N}, build)
    return HoloTrace(coeffs.copy())


def exact_surface(a: float, alphas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form profile x(alpha), y(alpha) of the exact family"""
    r = math.sqrt(a)
    alphas = np.asarray(alphas, dtype=float)
    denom = 1.0 + 2.0 * r * np.cos(alphas) + r * r
    x = alphas - 4.0 * r * np.sin(alphas) / denom
    y = -4.0 * r * (np.cos(alphas) + r) / denom
    return x, y

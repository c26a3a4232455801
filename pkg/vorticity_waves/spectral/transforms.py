"""
Periodic spectral primitives

Trigonometric synthesis/analysis on equispaced grids, the periodic Hilbert
transform on a strip of depth d (d = inf for the half-plane), harmonic and
holomorphic extension below (and slightly above) the surface, and
pointwise products on dealiased grids.

Cosine series sum c_n cos(n alpha) and sine series sum s_n sin(n alpha) are
stored as coefficient vectors indexed by n. FFTs use norm="forward" so the
zeroth rfft coefficient is the mean.
"""
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from vorticity_waves.config import settings
from vorticity_waves.errors import (
    ExtensionError,
    GridMismatchError,
    ParameterError,
    SymmetryViolationError,
    TruncationError,
)
from vorticity_waves.spectral.cache import multiplier_cache
from vorticity_waves.spectral.trace import HoloTrace, SampleGrid, node_angles

logger = logging.getLogger(__name__)

COS = "cos"
SIN = "sin"

PARTS = ("elevation", "horizontal", "elevation_slope", "horizontal_slope")


def grid_size(N: int, factor: int = 4) -> int:
    """Smallest power of two >= factor*N (and >= 8)"""
    target = max(8, factor * max(N, 1))
    return 1 << (target - 1).bit_length()


def _check_depth(d: float):
    if not (d > 0.0):
        raise ParameterError(f"Strip depth must be positive or infinite, got {d}")


def coth_multipliers(n_max: int, d: float) -> np.ndarray:
    """
    coth(n d) for n = 0..n_max, with the n = 0 entry set to 0.

    Large arguments use 1 + 2e/(1 - e), e = exp(-2nd), which never overflows.
    """
    _check_depth(d)

    def build() -> np.ndarray:
        n = np.arange(n_max + 1, dtype=float)
        table = np.zeros(n_max + 1)
        if math.isinf(d):
            table[1:] = 1.0
        else:
            x = n[1:] * d
            e = np.exp(-2.0 * x)
            table[1:] = 1.0 + 2.0 * e / (-np.expm1(-2.0 * x))
        return table

    return multiplier_cache.get_or_build("coth", {"n_max": n_max, "d": d}, build)


def extension_multipliers(n_max: int, d: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Level-beta multipliers for the imaginary (cosine) and real (sine) parts.

    Finite depth: sinh(n(beta+d))/sinh(nd) and cosh(n(beta+d))/sinh(nd).
    Infinite depth: exp(n beta) for both. Mode 0 keeps the mean in the
    imaginary part and contributes nothing to the real part.
    """
    _check_depth(d)

    def build_im() -> np.ndarray:
        return _level_multipliers(n_max, d, beta)[0]

    def build_re() -> np.ndarray:
        return _level_multipliers(n_max, d, beta)[1]

    args = {"n_max": n_max, "d": d, "beta": beta}
    im = multiplier_cache.get_or_build("extend_im", args, build_im)
    re = multiplier_cache.get_or_build("extend_re", args, build_re)
    return im, re


def _level_multipliers(n_max: int, d: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    n = np.arange(1, n_max + 1, dtype=float)
    im = np.empty(n_max + 1)
    re = np.empty(n_max + 1)
    im[0] = 1.0
    re[0] = 0.0
    if math.isinf(d):
        im[1:] = np.exp(n * beta)
        re[1:] = im[1:]
        return im, re
    head = np.exp(n * beta)
    bottom = np.exp(-2.0 * n * (beta + d))
    denom = -np.expm1(-2.0 * n * d)
    im[1:] = head * (1.0 - bottom) / denom
    re[1:] = head * (1.0 + bottom) / denom
    return im, re


def synthesize(coeffs: np.ndarray, M: int, kind: str = COS) -> np.ndarray:
    """Evaluate a cosine or sine series at the M nodes"""
    coeffs = np.asarray(coeffs, dtype=float)
    N = coeffs.size - 1
    if 2 * N + 2 > M:
        raise TruncationError(f"Grid of {M} nodes cannot resolve {N} modes (need M >= {2 * N + 2})")
    spectrum = np.zeros(M // 2 + 1, dtype=complex)
    if kind == COS:
        spectrum[0] = coeffs[0]
        spectrum[1:N + 1] = 0.5 * coeffs[1:]
    elif kind == SIN:
        spectrum[1:N + 1] = -0.5j * coeffs[1:]
    else:
        raise ValueError(f"Unknown series kind: {kind}")
    return np.fft.irfft(spectrum, n=M, norm="forward")


def analyze(values: np.ndarray, N: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split samples into cosine and sine coefficients up to mode N.

    Returns:
        (cosine coefficients, sine coefficients), both of length N + 1
    """
    values = np.asarray(values, dtype=float)
    M = values.size
    if N is None:
        N = M // 2 - 1
    if 2 * N + 2 > M:
        raise TruncationError(f"Cannot project {M} samples onto {N} modes")
    spectrum = np.fft.rfft(values, norm="forward")
    cos_coeffs = np.empty(N + 1)
    sin_coeffs = np.zeros(N + 1)
    cos_coeffs[0] = spectrum[0].real
    cos_coeffs[1:] = 2.0 * spectrum[1:N + 1].real
    sin_coeffs[1:] = -2.0 * spectrum[1:N + 1].imag
    return cos_coeffs, sin_coeffs


def differentiate(coeffs: np.ndarray, kind: str, order: int = 1) -> Tuple[np.ndarray, str]:
    """k-th alpha-derivative of a cosine/sine series as a new series"""
    coeffs = np.asarray(coeffs, dtype=float)
    n = np.arange(coeffs.size, dtype=float)
    out = coeffs.copy()
    for _ in range(order):
        if kind == COS:
            out, kind = -n * out, SIN
        else:
            out, kind = n * out, COS
    return out, kind


def evaluate_series(coeffs: np.ndarray, alphas: Union[float, np.ndarray], kind: str = COS,
                    order: int = 0) -> np.ndarray:
    """Direct evaluation of a series (or its derivative) at arbitrary points"""
    coeffs = np.asarray(coeffs, dtype=float)
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    n = np.arange(coeffs.size, dtype=float)
    weights = coeffs * n ** order if order else coeffs
    phase = np.outer(alphas, n) + order * 0.5 * np.pi
    basis = np.cos(phase) if kind == COS else np.sin(phase)
    return basis @ weights


def to_samples(t: HoloTrace, M: int, part: str = "elevation", d: float = math.inf) -> SampleGrid:
    """
    Sample one of the boundary series of a trace.

    Args:
        t: The trace
        M: Number of nodes, at least 2N + 2
        part: elevation (y), horizontal (Re w), elevation_slope (y_alpha)
            or horizontal_slope ((Re w)_alpha)
        d: Depth used for the horizontal parts (coth(nd) factors)

    Returns:
        Samples at alpha_j = 2*pi*j/M
    """
    b = t.coeffs
    n = np.arange(b.size, dtype=float)
    if part == "elevation":
        values = synthesize(b, M, COS)
    elif part == "elevation_slope":
        values = synthesize(-n * b, M, SIN)
    elif part == "horizontal":
        values = synthesize(b * coth_multipliers(t.N, d), M, SIN)
    elif part == "horizontal_slope":
        values = synthesize(n * b * coth_multipliers(t.N, d), M, COS)
    else:
        raise ValueError(f"Unknown trace part '{part}', expected one of {PARTS}")
    return SampleGrid(values)


def from_samples(s: SampleGrid, N: Optional[int] = None, tol: Optional[float] = None) -> HoloTrace:
    """
    Project samples of an even function onto a cosine trace.

    Raises:
        SymmetryViolationError: if the odd part carries more than ``tol`` of the energy
    """
    tol = settings.symmetry_tol if tol is None else tol
    full_cos, full_sin = analyze(s.values)
    if N is None:
        N = full_cos.size - 1
    elif N > full_cos.size - 1:
        raise TruncationError(f"Cannot project {s.M} samples onto {N} modes")
    odd = float(np.sqrt(np.sum(full_sin ** 2)))
    total = float(np.sqrt(np.sum(full_cos ** 2) + odd ** 2))
    if total > 0.0 and odd > tol * total:
        raise SymmetryViolationError(
            f"Samples are not even: odd part holds {odd / total:.3e} of the norm",
            details={"odd_fraction": odd / total},
        )
    return HoloTrace(full_cos[:N + 1])


def hilbert(f: Union[SampleGrid, np.ndarray], d: float = math.inf) -> Union[SampleGrid, np.ndarray]:
    """
    Periodic Hilbert transform on a strip of depth d.

    The symbol is -i coth(nd) on exp(i n alpha) (mode 0 and the Nyquist mode
    map to 0), so cos(n alpha) -> coth(nd) sin(n alpha) and
    sin(n alpha) -> -coth(nd) cos(n alpha).

    Args:
        f: Samples of a real function, or cosine coefficients
        d: Strip depth in (0, inf]

    Returns:
        Samples of the transform, or its sine coefficients when given coefficients
    """
    _check_depth(d)
    if isinstance(f, SampleGrid):
        M = f.M
        spectrum = np.fft.rfft(f.values, norm="forward")
        symbol = np.zeros(spectrum.size, dtype=complex)
        modes = spectrum.size - 1
        symbol[1:] = -1j * coth_multipliers(modes, d)[1:]
        if M % 2 == 0:
            symbol[-1] = 0.0
        return SampleGrid(np.fft.irfft(spectrum * symbol, n=M, norm="forward"))

    coeffs = np.asarray(f, dtype=float)
    return coeffs * coth_multipliers(coeffs.size - 1, d)


def _admissible(beta: float, d: float, band: float):
    if band < 0.0:
        raise ExtensionError(f"Analytic band must be non-negative, got {band}")
    if beta > band or (not math.isinf(d) and beta < -d) or not np.isfinite(beta):
        raise ExtensionError(
            f"Level beta={beta} outside the admissible band [{-d}, {band}]",
            details={"beta": beta, "depth": d, "band": band},
        )


def extend(t: HoloTrace, d: float, beta: float, M: int, band: float = 0.0) -> Tuple[SampleGrid, SampleGrid]:
    """
    Holomorphic extension of the trace to the level beta.

    Args:
        t: Boundary trace
        d: Conformal depth in (0, inf]
        beta: Level, in [-d, band]
        M: Number of nodes
        band: Largest admissible positive level (analytic band above the surface)

    Returns:
        (imaginary-part samples, real-part samples) at level beta
    """
    _check_depth(d)
    _admissible(beta, d, band)
    im_mult, re_mult = extension_multipliers(t.N, d, beta)
    im = synthesize(t.coeffs * im_mult, M, COS)
    re = synthesize(t.coeffs * re_mult, M, SIN)
    return SampleGrid(im), SampleGrid(re)


def extend_slopes(t: HoloTrace, d: float, beta: float, M: int, band: float = 0.0) -> Tuple[SampleGrid, SampleGrid]:
    """
    alpha-derivatives of the imaginary and real parts at level beta.

    The beta-derivatives follow from Cauchy-Riemann:
    d/dbeta Im = d/dalpha Re and d/dbeta Re = -d/dalpha Im.
    """
    _check_depth(d)
    _admissible(beta, d, band)
    n = np.arange(t.N + 1, dtype=float)
    im_mult, re_mult = extension_multipliers(t.N, d, beta)
    im_slope = synthesize(-n * t.coeffs * im_mult, M, SIN)
    re_slope = synthesize(n * t.coeffs * re_mult, M, COS)
    return SampleGrid(im_slope), SampleGrid(re_slope)


def zeta_derivative_trace(t: HoloTrace, d: float, M: int) -> Tuple[SampleGrid, SampleGrid]:
    """
    Im and Re of -i zeta dE/dzeta on |zeta| = 1, i.e. the alpha-derivatives
    of the boundary values of Im E and Re E.
    """
    return extend_slopes(t, d, 0.0, M)


def dealiased_product(f: SampleGrid, g: SampleGrid, *more: SampleGrid, n_modes: Optional[int] = None) -> SampleGrid:
    """
    Pointwise product on a common grid.

    With ``n_modes`` given, every factor is band-limited to modes 0..n_modes and
    the grid must hold more than (factors + 1) * n_modes nodes, so no product
    mode aliases back onto 0..n_modes.
    """
    grids = (f, g) + more
    M = f.M
    for grid in grids[1:]:
        if grid.M != M:
            raise GridMismatchError(f"Grid sizes differ: {M} vs {grid.M}")
    if n_modes is not None and M <= (len(grids) + 1) * n_modes:
        raise TruncationError(
            f"Product grid of {M} nodes is aliased for {len(grids)} factors of {n_modes} modes",
            details={"M": M, "n_modes": n_modes, "factors": len(grids)},
        )
    values = f.values.copy()
    for grid in grids[1:]:
        values = values * grid.values
    return SampleGrid(values)


__all__ = [
    "COS",
    "SIN",
    "analyze",
    "coth_multipliers",
    "dealiased_product",
    "differentiate",
    "evaluate_series",
    "extend",
    "extend_slopes",
    "extension_multipliers",
    "from_samples",
    "grid_size",
    "hilbert",
    "node_angles",
    "synthesize",
    "to_samples",
    "zeta_derivative_trace",
]

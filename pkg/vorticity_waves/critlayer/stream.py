"""
Stream function in conformal coordinates and the critical-layer indicator

With y(alpha, beta) the extended elevation, the stream function is

    Psi = -(omega/2) y^2 - y + Im chi

where chi is holomorphic on the strip and Im chi = (omega/2) y^2 + y on the
surface, so Psi vanishes there. Im chi is extended with the same depth
multipliers as the trace. F = Psi_alpha y_alpha + Psi_beta x_alpha vanishes
exactly where the horizontal velocity relative to the wave does.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from vorticity_waves.config import settings
from vorticity_waves.errors import BernoulliBranchError, ExtensionError
from vorticity_waves.model.parameters import constants_of
from vorticity_waves.model.solution import Solution
from vorticity_waves.spectral.trace import HoloTrace
from vorticity_waves.spectral.transforms import (
    COS,
    SIN,
    analyze,
    evaluate_series,
    extension_multipliers,
    grid_size,
    synthesize,
)

logger = logging.getLogger(__name__)

MAX_TAIL_AMPLIFICATION = 1e6


@dataclass
class FieldGrid:
    """Scalar field on a rectangular (alpha, beta) grid; values[i, j] sits at (alphas[j], betas[i])"""
    alphas: np.ndarray
    betas: np.ndarray
    values: np.ndarray

    def rows(self):
        """(alpha, beta, value) triples, beta-major"""
        for i, beta in enumerate(self.betas):
            for j, alpha in enumerate(self.alphas):
                yield float(alpha), float(beta), float(self.values[i, j])


def analytic_band(t: HoloTrace, tail_tol: float) -> float:
    """
    Largest beta > 0 at which the amplified coefficient tail stays below
    ``tail_tol`` of the head, capped by a 1e6 tail amplification
    """
    if t.N < 1:
        return math.inf
    magnitudes = np.abs(t.coeffs[1:])
    head = float(np.max(magnitudes))
    if head == 0.0:
        return math.inf
    tail = max(1, t.N // 10)
    tail_rel = max(float(np.max(magnitudes[-tail:])) / head, 1e-16)
    band = min(math.log(tail_tol / tail_rel), math.log(MAX_TAIL_AMPLIFICATION)) / t.N
    return max(0.0, band)


@dataclass(frozen=True)
class StreamEvaluator:
    """
    Point evaluation of Psi, its derivatives and F anywhere in the admissible band

    Immutable after construction and safe to share between threads.
    """
    solution: Solution
    omega: float
    bernoulli: float
    gravity: float
    depth: float
    y_trace: HoloTrace
    chi_trace: HoloTrace
    beta_max: float

    def check_level(self, beta: float):
        if not np.isfinite(beta) or beta > self.beta_max or (not math.isinf(self.depth) and beta < -self.depth):
            raise ExtensionError(
                f"Level beta={beta} outside [{-self.depth}, {self.beta_max}]",
                details={"beta": beta, "beta_max": self.beta_max, "depth": self.depth},
            )

    def _level(self, t: HoloTrace, alphas: np.ndarray, beta: float) -> Dict[str, np.ndarray]:
        im_mult, re_mult = extension_multipliers(t.N, self.depth, beta)
        im_coeffs = t.coeffs * im_mult
        re_coeffs = t.coeffs * re_mult
        return {
            "im": evaluate_series(im_coeffs, alphas, COS),
            "im_alpha": evaluate_series(im_coeffs, alphas, COS, 1),
            "im_alpha_alpha": evaluate_series(im_coeffs, alphas, COS, 2),
            # Cauchy-Riemann: d/dbeta Im = d/dalpha Re
            "im_beta": evaluate_series(re_coeffs, alphas, SIN, 1),
            # d/dbeta of each level multiplier pair returns n times the other one
            "im_beta_beta": evaluate_series(im_coeffs * np.arange(t.N + 1) ** 2, alphas, COS),
        }

    def surface_map(self, alphas, beta: float) -> Dict[str, np.ndarray]:
        """y, y_alpha, y_alpha_alpha and x_alpha of the conformal map at level beta"""
        self.check_level(beta)
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        level = self._level(self.y_trace, alphas, beta)
        return {
            "y": beta + level["im"],
            "y_alpha": level["im_alpha"],
            "y_alpha_alpha": level["im_alpha_alpha"],
            "x_alpha": 1.0 + level["im_beta"],
        }

    def psi(self, alphas, beta: float) -> np.ndarray:
        self.check_level(beta)
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        y = beta + self._level(self.y_trace, alphas, beta)["im"]
        chi = self._level(self.chi_trace, alphas, beta)["im"]
        return -0.5 * self.omega * y * y - y + chi

    def gradient(self, alphas, beta: float) -> Tuple[np.ndarray, np.ndarray]:
        """(Psi_alpha, Psi_beta) at level beta"""
        geo = self.surface_map(alphas, beta)
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        chi = self._level(self.chi_trace, alphas, beta)
        factor = self.omega * geo["y"] + 1.0
        psi_alpha = -factor * geo["y_alpha"] + chi["im_alpha"]
        psi_beta = -factor * geo["x_alpha"] + chi["im_beta"]
        return psi_alpha, psi_beta

    def psi_alpha_alpha(self, alphas, beta: float) -> np.ndarray:
        geo = self.surface_map(alphas, beta)
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        chi = self._level(self.chi_trace, alphas, beta)
        return (-self.omega * geo["y_alpha"] ** 2
                - (self.omega * geo["y"] + 1.0) * geo["y_alpha_alpha"]
                + chi["im_alpha_alpha"])

    def psi_beta_beta(self, alphas, beta: float) -> np.ndarray:
        geo = self.surface_map(alphas, beta)
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        y_beta_beta = self._level(self.y_trace, alphas, beta)["im_beta_beta"]
        chi = self._level(self.chi_trace, alphas, beta)
        return (-self.omega * geo["x_alpha"] ** 2
                - (self.omega * geo["y"] + 1.0) * y_beta_beta
                + chi["im_beta_beta"])

    def field(self, alphas, beta: float) -> np.ndarray:
        """Critical-layer indicator F = Psi_alpha y_alpha + Psi_beta x_alpha"""
        geo = self.surface_map(alphas, beta)
        psi_alpha, psi_beta = self.gradient(alphas, beta)
        return psi_alpha * geo["y_alpha"] + psi_beta * geo["x_alpha"]

    def physical_point(self, alphas, beta: float) -> Tuple[np.ndarray, np.ndarray]:
        """(x, y) image of the level-beta points"""
        self.check_level(beta)
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        _, re_mult = extension_multipliers(self.y_trace.N, self.depth, beta)
        x = alphas + evaluate_series(self.y_trace.coeffs * re_mult, alphas, SIN)
        return x, self.surface_map(alphas, beta)["y"]

    def horizontal_velocity(self, alphas, beta: float) -> np.ndarray:
        """Physical psi_y = F / |z_alpha|^2"""
        geo = self.surface_map(alphas, beta)
        return self.field(alphas, beta) / (geo["x_alpha"] ** 2 + geo["y_alpha"] ** 2)


def stream_extension(s: Solution, tail_tol: Optional[float] = None) -> StreamEvaluator:
    """
    Build the stream-function evaluator of a Solution

    Args:
        s: Solution
        tail_tol: Relative tail bound fixing the analytic band above the surface

    Returns:
        StreamEvaluator

    Raises:
        BernoulliBranchError: if B - G y <= 0 somewhere on the surface
    """
    tail_tol = settings.analytic_tail_tol if tail_tol is None else tail_tol
    const = constants_of(s.params)
    t = s.trace
    M = grid_size(max(2 * t.N, 1), 4)
    y = synthesize(t.coeffs, M, COS)
    head = const.bernoulli - const.gravity * y
    if float(np.min(head)) <= 0.0:
        raise BernoulliBranchError(
            f"B - G y reaches {float(np.min(head)):.3e} on the surface",
            details={"min_head": float(np.min(head))},
        )

    chi_cos, _ = analyze(0.5 * const.omega * y * y + y, 2 * t.N)
    evaluator = StreamEvaluator(
        solution=s,
        omega=const.omega,
        bernoulli=const.bernoulli,
        gravity=const.gravity,
        depth=const.depth,
        y_trace=t,
        chi_trace=HoloTrace(chi_cos),
        beta_max=analytic_band(t, tail_tol),
    )
    logger.debug(f"Stream evaluator with analytic band beta_max={evaluator.beta_max:.4g}")
    return evaluator


def f_field(
    e: StreamEvaluator,
    window: Tuple[float, float, float, float],
    resolution: Sequence[int] = (400, 200),
) -> FieldGrid:
    """
    Sample F on a rectangular window

    Args:
        e: Stream evaluator
        window: (alpha_lo, alpha_hi, beta_lo, beta_hi)
        resolution: (columns, rows)

    Returns:
        FieldGrid with values of shape (rows, columns)
    """
    alpha_lo, alpha_hi, beta_lo, beta_hi = window
    columns, rows = resolution
    e.check_level(beta_lo)
    e.check_level(beta_hi)
    alphas = np.linspace(alpha_lo, alpha_hi, columns)
    betas = np.linspace(beta_lo, beta_hi, rows)
    values = np.vstack([e.field(alphas, beta) for beta in betas])
    return FieldGrid(alphas=alphas, betas=betas, values=values)


def flux_constant(e: StreamEvaluator) -> Optional[float]:
    """Value of Psi on the flat bottom (finite depth); None in deep water"""
    if math.isinf(e.depth):
        return None
    return float(e.psi(np.array([0.0]), -e.depth)[0])


def poisson_residual(e: StreamEvaluator, betas: Sequence[float], M: int = 64) -> float:
    """
    Largest |Psi_aa + Psi_bb + omega |z_alpha|^2| over interior levels

    Both second derivatives are spectral: Psi_aa from the alpha series, Psi_bb
    from the beta derivatives of the level multipliers.
    """
    alphas = 2.0 * np.pi * np.arange(M) / M
    worst = 0.0
    for beta in betas:
        psi_bb = e.psi_beta_beta(alphas, beta)
        geo = e.surface_map(alphas, beta)
        source = e.omega * (geo["x_alpha"] ** 2 + geo["y_alpha"] ** 2)
        worst = max(worst, float(np.max(np.abs(e.psi_alpha_alpha(alphas, beta) + psi_bb + source))))
    return worst

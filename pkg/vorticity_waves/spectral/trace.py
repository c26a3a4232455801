"""
Coefficient and sample containers for periodic traces
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HoloTrace:
    """
    Boundary trace of the holomorphic perturbation w on |zeta| = 1.

    ``coeffs[n]`` is b_n with w_n = i*b_n, so the elevation is
    y(alpha) = sum b_n cos(n alpha) and, in deep water, Re w = sum b_n sin(n alpha).
    """
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).ravel()
        if coeffs.size < 1:
            raise ValueError("A trace needs at least the mean coefficient b_0")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def N(self) -> int:
        """Truncation order"""
        return self.coeffs.size - 1

    @classmethod
    def zeros(cls, N: int) -> "HoloTrace":
        return cls(np.zeros(N + 1))

    @classmethod
    def constant(cls, value: float, N: int) -> "HoloTrace":
        coeffs = np.zeros(N + 1)
        coeffs[0] = value
        return cls(coeffs)

    def resized(self, N: int) -> "HoloTrace":
        """Zero-pad or truncate to order N"""
        coeffs = np.zeros(N + 1)
        keep = min(N, self.N) + 1
        coeffs[:keep] = self.coeffs[:keep]
        return HoloTrace(coeffs)

    def is_constant(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs[1:]) <= atol))

    def oscillation(self) -> float:
        """Largest non-mean coefficient magnitude"""
        return float(np.max(np.abs(self.coeffs[1:]))) if self.N > 0 else 0.0

    def tail_energy_ratio(self) -> float:
        """Energy in the top 10% of modes relative to the oscillatory energy (mean excluded)"""
        energy = self.coeffs[1:] ** 2
        total = float(np.sum(energy))
        if total == 0.0:
            return 0.0
        tail = max(1, self.N // 10)
        return float(np.sum(energy[-tail:]) / total)


@dataclass(frozen=True)
class SampleGrid:
    """Values at the equispaced nodes alpha_j = 2*pi*j/M"""
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())

    @property
    def M(self) -> int:
        return self.values.size

    @property
    def alphas(self) -> np.ndarray:
        return node_angles(self.M)


def node_angles(M: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(M) / M

"""
Solution container shared by the solver, geometry and critical-layer layers
"""
from dataclasses import dataclass, field
from typing import Dict, Optional

from vorticity_waves.models.schemas import AnyParams, ProfileReport, WaveClass
from vorticity_waves.spectral.trace import HoloTrace


@dataclass
class Solution:
    """A converged trace together with its parameters, residual and geometry"""
    trace: HoloTrace
    params: AnyParams
    residual_norm: float
    wave_class: WaveClass
    diagnostics: Dict[str, float] = field(default_factory=dict)
    profile: Optional[ProfileReport] = None

    @property
    def N(self) -> int:
        return self.trace.N

    @property
    def a(self) -> float:
        return getattr(self.params, "a", float("nan"))

    @property
    def amplitude(self) -> float:
        """cos(alpha) coefficient"""
        return float(self.trace.coeffs[1]) if self.trace.N >= 1 else 0.0

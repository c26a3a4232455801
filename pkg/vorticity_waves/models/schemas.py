"""
Pydantic models for the wave solver
"""
import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from vorticity_waves.config import settings

FORMAT_VERSION = 1


class WaveClass(str, Enum):
    """Profile classification"""
    LAMINAR = "laminar"
    REGULAR = "regular"
    BREAKING = "breaking"
    OVERHANGING = "overhanging"
    TOUCHING = "touching"
    INVALID = "invalid"


class EventKind(str, Enum):
    """Events located along a branch"""
    BIFURCATION = "bifurcation"
    BREAKING = "breaking"
    TOUCHING = "touching"
    OVERHANG_ONSET = "overhang_onset"


class CritSide(str, Enum):
    """Where the critical layer meets a vertical-tangent surface point"""
    ABOVE_SURFACE = "above_surface"
    BELOW_SURFACE = "below_surface"
    CROSSING = "crossing"
    NONE = "none"


class Params(BaseModel):
    """Continuation parameters (G, a, l); vorticity and Bernoulli constant follow from a"""
    model_config = ConfigDict(frozen=True)

    G: float = Field(..., description="Dimensionless gravity")
    a: float = Field(..., description="Family parameter, a != 1/3")
    l: float = Field(0.0, ge=0.0, description="Inverse square root of the conformal depth (0 = infinite depth)")

    @property
    def depth(self) -> float:
        """Conformal depth d = 1/l^2 (inf for l = 0)"""
        return math.inf if self.l == 0.0 else 1.0 / (self.l * self.l)

    def with_a(self, a: float) -> "Params":
        return self.model_copy(update={"a": float(a)})


class GeneralParams(BaseModel):
    """Independent vorticity, Bernoulli constant, gravity and depth"""
    model_config = ConfigDict(frozen=True)

    omega: float = Field(..., description="Dimensionless vorticity")
    bernoulli: float = Field(..., description="Bernoulli constant B")
    G: float = Field(0.0, description="Dimensionless gravity")
    d: Optional[float] = Field(None, gt=0.0, description="Conformal depth, None for infinite depth")

    @property
    def depth(self) -> float:
        return math.inf if self.d is None else float(self.d)


AnyParams = Union[Params, GeneralParams]


class SolverOptions(BaseModel):
    """Newton, continuation and geometry tolerances"""
    newton_tol: float = Field(1e-11, gt=0.0, description="Residual sup-norm target")
    max_newton_iters: int = Field(25, gt=0)
    damping_factor: float = Field(0.5, gt=0.0, lt=1.0, description="Line-search backtracking factor")
    max_halvings: int = Field(10, ge=0)
    fd_step: float = Field(1e-6, gt=0.0, description="Relative finite-difference step")
    denominator_floor: float = Field(1e-10, gt=0.0)
    dealias_factor: int = Field(4, ge=4)
    escalate: bool = Field(True, description="Double N when the coefficient tail is too heavy")
    n_max: int = Field(1024, gt=0)
    tail_energy_threshold: float = Field(1e-8, gt=0.0)
    slope_tol: float = Field(1e-6, gt=0.0)
    gap_tol: float = Field(1e-3, gt=0.0)
    guard_band: float = Field(0.5, gt=0.0)
    stagnation_floor: float = Field(1e-8, gt=0.0)
    geometry_oversample: int = Field(8, ge=2)
    da_initial: float = Field(1e-3, gt=0.0)
    da_min: float = Field(1e-7, gt=0.0)
    da_max: float = Field(1e-2, gt=0.0)
    step_grow: float = Field(1.3, gt=1.0)
    step_shrink: float = Field(0.5, gt=0.0, lt=1.0)
    grow_after_iters: int = Field(3, ge=0)
    max_points: int = Field(4000, gt=0)
    event_tol: float = Field(1e-8, gt=0.0)
    refine_events: bool = Field(True, description="Refine breaking/overhang crossings while marching")

    @classmethod
    def from_settings(cls, **overrides: Any) -> "SolverOptions":
        """Build options from the global settings, then apply overrides"""
        values = {
            "newton_tol": settings.newton_tol,
            "max_newton_iters": settings.max_newton_iters,
            "damping_factor": settings.damping_factor,
            "max_halvings": settings.max_halvings,
            "fd_step": settings.fd_step,
            "denominator_floor": settings.denominator_floor,
            "dealias_factor": settings.dealias_factor,
            "n_max": settings.escalated_truncation,
            "tail_energy_threshold": settings.tail_energy_threshold,
            "slope_tol": settings.slope_tol,
            "gap_tol": settings.gap_tol,
            "guard_band": settings.guard_band,
            "stagnation_floor": settings.stagnation_floor,
            "geometry_oversample": settings.geometry_oversample,
            "da_initial": settings.da_initial,
            "da_min": settings.da_min,
            "da_max": settings.da_max,
            "step_grow": settings.step_grow,
            "step_shrink": settings.step_shrink,
            "grow_after_iters": settings.grow_after_iters,
            "max_points": settings.max_branch_points,
            "event_tol": settings.event_tol,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class ProfileReport(BaseModel):
    """Geometric summary of a surface profile"""
    wave_class: WaveClass
    min_x_slope: float
    alpha_crit: Optional[float] = Field(None, description="Location of min x_alpha")
    self_gap: float = Field(..., description="Minimum distance between non-adjacent surface points")
    gap_pair: Optional[Tuple[float, float]] = None
    bubble_area: Optional[float] = None
    depth_H: Optional[float] = Field(None, description="Physical depth, None for infinite depth")
    injective: bool
    min_z_slope_modulus: float


class CritReport(BaseModel):
    """Critical layer near a vertical-tangent surface point"""
    alpha_crit: float
    k: int = Field(..., description="Order of the first nonvanishing derivative of x at alpha_crit")
    side: CritSide
    fitted_exponent: Optional[float] = None
    fitted_coefficient: Optional[float] = None
    predicted_coefficient: Optional[float] = None
    relative_mismatch: Optional[float] = None
    window_half_width: float
    columns_with_root: int = 0
    diagnostics: Dict[str, float] = Field(default_factory=dict)


class RunConfig(BaseModel):
    """Fully resolved configuration of one command-line run"""
    model_config = ConfigDict(extra="forbid")

    command: str = Field("validate", description="Subcommand")
    G: float = 0.0
    G_values: List[float] = Field(default_factory=list, description="Several gravities for a sweep")
    a: Optional[float] = None
    a_start: Optional[float] = None
    a_end: Union[float, Literal["touch"], None] = None
    l: float = Field(0.0, ge=0.0)
    omega: Optional[float] = Field(None, description="General mode vorticity")
    bernoulli: Optional[float] = Field(None, description="General mode Bernoulli constant")
    n: int = Field(default_factory=lambda: settings.truncation, gt=0)
    from_bifurcation: bool = False
    switch_amplitude: float = Field(default_factory=lambda: settings.switch_amplitude)
    initial: Optional[str] = Field(None, description="Initial Solution file for solve")
    branch: Optional[str] = Field(None, description="Branch file for events")
    solution: Optional[str] = Field(None, description="Solution file for critlayer")
    kinds: List[EventKind] = Field(default_factory=lambda: [EventKind.BREAKING])
    alpha: Optional[float] = Field(None, description="Vertical-tangent override for critlayer")
    half_width: Optional[float] = None
    beta_min: Optional[float] = Field(None, description="Lower beta of the critlayer field window")
    beta_max: Optional[float] = Field(None, description="Upper beta of the critlayer field window")
    columns: int = Field(default_factory=lambda: settings.crit_columns, gt=1)
    rows: int = Field(default_factory=lambda: settings.crit_rows, gt=1)
    only: List[str] = Field(default_factory=list)
    perturb: Optional[str] = None
    out: str = Field(default_factory=lambda: settings.output_dir)
    seed: int = 0
    workers: int = Field(default_factory=lambda: settings.workers, gt=0)
    options: SolverOptions = Field(default_factory=SolverOptions.from_settings)


class ParamsRecord(BaseModel):
    """Serialized parameter block"""
    G: float
    a: Optional[float] = None
    l: Optional[float] = None
    omega: float
    B: float
    d: Optional[float] = Field(None, description="None for infinite depth")


class SolutionRecord(BaseModel):
    """On-disk Solution"""
    version: int = FORMAT_VERSION
    config: Optional[Dict[str, Any]] = None
    params: ParamsRecord
    n: int
    coeffs: List[float]
    residual_norm: float
    wave_class: WaveClass = Field(..., alias="class")
    diagnostics: Dict[str, Optional[float]] = Field(default_factory=dict)

    model_config = ConfigDict(populate_by_name=True)


class EventRecord(BaseModel):
    kind: EventKind
    value: float
    solution: SolutionRecord


class BranchRecord(BaseModel):
    """On-disk Branch"""
    version: int = FORMAT_VERSION
    config: Optional[Dict[str, Any]] = None
    path: Dict[str, Any]
    n: int
    points: List[SolutionRecord]
    events: List[EventRecord] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)

"""
Branch container and trace interpolation along a parameter path
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Union

import numpy as np

from vorticity_waves.model.solution import Solution
from vorticity_waves.models.schemas import EventKind
from vorticity_waves.spectral.trace import HoloTrace

Target = Union[float, str]
TOUCH = "touch"


@dataclass
class BranchEvent:
    """A located event: its kind, the refined parameter and the Solution there"""
    kind: EventKind
    value: float
    solution: Solution


@dataclass
class Branch:
    """
    Ordered Solutions along a parameter path at fixed (G, l)

    ``path`` describes the swept parameter: G, l, a_start, a_end and the
    marching direction. ``status`` is "complete", "touching" or "stalled".
    """
    points: List[Solution]
    path: Dict[str, Any]
    events: List[BranchEvent] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    status: str = "complete"

    @property
    def parameters(self) -> np.ndarray:
        return np.array([point.a for point in self.points])

    @property
    def N(self) -> int:
        return max(point.N for point in self.points) if self.points else 0

    def add_event(self, kind: EventKind, value: float, solution: Solution):
        self.events.append(BranchEvent(kind=kind, value=float(value), solution=solution))
        self.events.sort(key=lambda event: event.value)

    def events_of(self, kind: EventKind) -> List[BranchEvent]:
        return [event for event in self.events if event.kind == kind]


def interpolate_traces(t1: HoloTrace, a1: float, t2: HoloTrace, a2: float, a: float) -> HoloTrace:
    """
    Linear inter- or extrapolation in the family parameter, padded to the larger order
    """
    N = max(t1.N, t2.N)
    c1 = t1.resized(N).coeffs
    c2 = t2.resized(N).coeffs
    if a2 == a1:
        return HoloTrace(c2)
    weight = (a - a1) / (a2 - a1)
    return HoloTrace(c1 + weight * (c2 - c1))

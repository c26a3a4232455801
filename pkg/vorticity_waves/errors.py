"""
Fault hierarchy for the wave solver

Every fault carries a machine-readable ``reason`` and the process exit code
the command line maps it to.
"""
from typing import Any, Dict, Optional


class WaveSolverError(Exception):
    """Base class for all solver faults"""

    reason: str = "solver_fault"
    exit_code: int = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Serializable payload written next to failed runs"""
        return {
            "status": "error",
            "reason": self.reason,
            "message": self.message,
            "details": self.details,
        }


class TruncationError(WaveSolverError):
    reason = "truncation"


class SymmetryViolationError(WaveSolverError):
    reason = "symmetry_violation"


class ParameterError(WaveSolverError):
    reason = "parameter"


class ExtensionError(WaveSolverError):
    reason = "extension"


class GridMismatchError(WaveSolverError):
    reason = "grid_mismatch"


class SingularParameterError(WaveSolverError):
    reason = "singular_parameter"


class NoLaminarError(WaveSolverError):
    reason = "no_laminar"


class DivergentSeriesError(WaveSolverError):
    reason = "divergent_series"


class OutsideUError(WaveSolverError):
    """The surface map has a (near) vanishing derivative on the grid"""
    reason = "outside_u"


class DifferentiationError(WaveSolverError):
    reason = "differentiation"


class BifurcationNotFoundError(WaveSolverError):
    reason = "bifurcation_not_found"


class DegenerateBifurcationError(WaveSolverError):
    reason = "degenerate_bifurcation"


class NoConvergenceError(WaveSolverError):
    reason = "no_convergence"


class BranchSwitchError(WaveSolverError):
    reason = "branch_switch"


class StalledBranchError(WaveSolverError):
    """Continuation ran out of step size; the partial branch is attached"""
    reason = "stalled_branch"

    def __init__(self, message: str, branch: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.branch = branch


class EventNotFoundError(WaveSolverError):
    reason = "event_not_found"


class BernoulliBranchError(WaveSolverError):
    reason = "bernoulli_branch"


class StagnationError(WaveSolverError):
    reason = "stagnation"


class NoVerticalTangentError(WaveSolverError):
    reason = "no_vertical_tangent"
    exit_code = 4


class ConfigError(WaveSolverError):
    reason = "config"
    exit_code = 3

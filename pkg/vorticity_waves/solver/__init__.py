"""
Solver package: Newton corrector, branch switching, continuation and events
"""
from .branch import TOUCH, Branch, BranchEvent, interpolate_traces
from .continuation import (
    arclength_step,
    bifurcation_seeds,
    branch_from_bifurcation,
    branch_switch,
    continue_branch,
)
from .events import event_indicator, locate_event, refine_event
from .newton import NewtonOutcome, damped_newton, newton_solve
from .tracking import SolveTracker

__all__ = [
    'TOUCH',
    'Branch',
    'BranchEvent',
    'NewtonOutcome',
    'SolveTracker',
    'arclength_step',
    'bifurcation_seeds',
    'branch_from_bifurcation',
    'branch_switch',
    'continue_branch',
    'damped_newton',
    'event_indicator',
    'interpolate_traces',
    'locate_event',
    'newton_solve',
    'refine_event',
]

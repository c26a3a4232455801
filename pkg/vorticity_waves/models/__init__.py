"""
Models package
"""
from .schemas import (
    FORMAT_VERSION,
    AnyParams,
    BranchRecord,
    CritReport,
    CritSide,
    EventKind,
    EventRecord,
    GeneralParams,
    Params,
    ParamsRecord,
    ProfileReport,
    RunConfig,
    SolutionRecord,
    SolverOptions,
    WaveClass,
)

__all__ = [
    'FORMAT_VERSION',
    'AnyParams',
    'BranchRecord',
    'CritReport',
    'CritSide',
    'EventKind',
    'EventRecord',
    'GeneralParams',
    'Params',
    'ParamsRecord',
    'ProfileReport',
    'RunConfig',
    'SolutionRecord',
    'SolverOptions',
    'WaveClass',
]

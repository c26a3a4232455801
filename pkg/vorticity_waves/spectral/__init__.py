"""
Spectral primitives package
"""
from .cache import MultiplierCache, multiplier_cache
from .trace import HoloTrace, SampleGrid, node_angles
from .transforms import (
    COS,
    SIN,
    analyze,
    coth_multipliers,
    dealiased_product,
    differentiate,
    evaluate_series,
    extend,
    extend_slopes,
    extension_multipliers,
    from_samples,
    grid_size,
    hilbert,
    synthesize,
    to_samples,
    zeta_derivative_trace,
)

__all__ = [
    'COS',
    'SIN',
    'HoloTrace',
    'MultiplierCache',
    'SampleGrid',
    'analyze',
    'coth_multipliers',
    'dealiased_product',
    'differentiate',
    'evaluate_series',
    'extend',
    'extend_slopes',
    'extension_multipliers',
    'from_samples',
    'grid_size',
    'hilbert',
    'multiplier_cache',
    'node_angles',
    'synthesize',
    'to_samples',
    'zeta_derivative_trace',
]

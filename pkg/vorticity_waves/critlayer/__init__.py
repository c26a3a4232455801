"""
Critical-layer package: stream function, indicator field and contour classification
"""
from .contour import (
    Contour,
    derivative_order,
    predicted_coefficient,
    trace_and_classify,
    trace_contour,
    vertical_tangents,
    window_half_width,
)
from .stream import (
    FieldGrid,
    StreamEvaluator,
    analytic_band,
    f_field,
    flux_constant,
    poisson_residual,
    stream_extension,
)

__all__ = [
    'Contour',
    'FieldGrid',
    'StreamEvaluator',
    'analytic_band',
    'derivative_order',
    'f_field',
    'flux_constant',
    'poisson_residual',
    'predicted_coefficient',
    'stream_extension',
    'trace_and_classify',
    'trace_contour',
    'vertical_tangents',
    'window_half_width',
]

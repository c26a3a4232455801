"""
Steady periodic water waves over constant vorticity: spectral solver,
continuation engine, geometry tests and critical-layer analysis
"""
__version__ = "1.0.0"

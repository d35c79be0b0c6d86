"""Depth-averaged non-hydrostatic shallow-water model: analytic solutions,
pressure equation, a prediction-correction solver and verification tools."""

__version__ = "0.1.0"

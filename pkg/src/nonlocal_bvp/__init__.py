"""Nonlocal degenerate parabolic-hyperbolic equations on an interval with exterior data."""

__version__ = "0.1.0"

"""Numerical laboratory for critical points of random real pencils."""

__version__ = "0.1.0"

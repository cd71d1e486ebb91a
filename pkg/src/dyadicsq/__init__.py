"""Numerical laboratory for two-weight dyadic square function estimates."""

__version__ = "0.1.0"

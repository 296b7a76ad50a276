"""Numerical verification of regulator integrals of Siegel units against L-values."""

__version__ = "0.1.0"

"""Operator-valued harmonic analysis on the unit circle for matrix-valued functions."""

__version__ = "0.1.0"

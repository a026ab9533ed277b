"""Certified explicit bounds for linear forms in three logarithms."""

__version__ = "0.1.0"

"""Symmetry-based structural identifiability and observability analysis."""

__version__ = "0.1.0"

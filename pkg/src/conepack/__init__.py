"""Hyperbolic circle packings with prescribed cone angles on triangulated surfaces."""

__version__ = "0.1.0"

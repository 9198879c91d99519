"""Numerical ranges of holomorphic maps on balls of C^n: oracles, bounds and radii."""

__version__ = "0.1.0"

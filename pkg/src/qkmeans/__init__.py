"""Quantum k-means clustering with swap-test distance estimation."""

__version__ = "0.1.0"

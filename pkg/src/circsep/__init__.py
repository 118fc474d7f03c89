"""Separability analysis for circulant bipartite densities in prime dimension."""

__version__ = "0.1.0"

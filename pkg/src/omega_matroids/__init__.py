"""Schubert expansions of rank 2 and rank 3 matroids and the polytopes of all matroids."""

__version__ = "0.1.0"

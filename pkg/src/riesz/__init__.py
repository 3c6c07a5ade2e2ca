"""Regularized Riesz potentials of compact bodies, their centers, and ball-proximity measures."""

__version__ = "0.1.0"

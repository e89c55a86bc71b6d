"""Lie point symmetry toolkit for the two-parameter nonlinear Fokker-Planck family."""

__version__ = "0.1.0"

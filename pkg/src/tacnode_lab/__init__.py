"""Numerics for the discrete tacnode kernel and blue-tile densities of
lozenge tilings of a hexagon with two opposite cuts, plus an MCMC
simulator of the finite model for empirical verification."""

__version__ = "0.1.0"

"""Spectral-gap analysis for 2D photonic crystals with separable permittivity."""

__version__ = "0.1.0"

"""Numerical toolkit for completeness of translates in the Hardy space H^1.

Modules: grids and Fourier/Hilbert transforms, norms (H^1, BMO, Sobolev,
star), molecules, discrete frequency sets and density estimates, generator
constructions, annihilators, and a scenario CLI.
"""

__version__ = "0.1.0"

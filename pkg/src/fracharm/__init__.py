"""Minimizing fractional harmonic maps from the line into spheres.

Exact piecewise-constant discretization of the nonlocal s-energy, a
constrained descent solver, the explicit Caffarelli-Silvestre extension with
its density and monotonicity diagnostics, the rotating-competitor variation
formulas, and blow-up analysis of computed maps.
"""
from ._accel import BACKEND
from .energy import LatticeMap, LineGrid, assemble, energy, energy_gradient, localized_energy
from .manifold import TargetManifold, circle, point_pair, sphere
from .riesz import FractionalOrder, Interval, gamma_s, kernel_mass, sigma_s

__all__ = [
    "BACKEND",
    "FractionalOrder",
    "Interval",
    "LatticeMap",
    "LineGrid",
    "TargetManifold",
    "assemble",
    "circle",
    "energy",
    "energy_gradient",
    "gamma_s",
    "kernel_mass",
    "localized_energy",
    "point_pair",
    "sigma_s",
    "sphere",
]
__version__ = "0.1.0"

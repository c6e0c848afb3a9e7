"""dipolar - nonlocal isoperimetric energies of planar shapes."""

__version__ = "1.0.0"

from dipolar.kernels import KernelParams, LayerSeparation
from dipolar.geometry import JordanCurve, ShapeConfig, make_disk, make_ellipse, make_stripe
from dipolar.evaluators import EnergyBreakdown, EvaluatorTag, energy_boundary, energy_grid, gamma_limit_energy
from dipolar.services.energy_service import EnergyService

__all__ = [
    "KernelParams",
    "LayerSeparation",
    "JordanCurve",
    "ShapeConfig",
    "make_disk",
    "make_ellipse",
    "make_stripe",
    "EnergyBreakdown",
    "EvaluatorTag",
    "energy_boundary",
    "energy_grid",
    "gamma_limit_energy",
    "EnergyService",
]

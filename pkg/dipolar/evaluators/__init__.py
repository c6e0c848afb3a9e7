"""Energy evaluator plug-ins."""

from dipolar.evaluators.base_evaluator import BaseEvaluator, EnergyBreakdown, EvaluatorTag
from dipolar.evaluators.grid_evaluator import GridEvaluator, energy_grid
from dipolar.evaluators.boundary_evaluator import (
    BoundaryEvaluator,
    energy_boundary,
    potential_on_boundary,
    potentials_at_nodes,
)
from dipolar.evaluators.gamma_evaluator import (
    GammaLimitEvaluator,
    ModifiedGammaLimitEvaluator,
    SubcriticalGammaLimitEvaluator,
    gamma_limit_energy,
    gamma_limit_energy_modified,
    gamma_limit_subcritical,
)

__all__ = [
    "BaseEvaluator",
    "EnergyBreakdown",
    "EvaluatorTag",
    "GridEvaluator",
    "energy_grid",
    "BoundaryEvaluator",
    "energy_boundary",
    "potential_on_boundary",
    "potentials_at_nodes",
    "GammaLimitEvaluator",
    "ModifiedGammaLimitEvaluator",
    "SubcriticalGammaLimitEvaluator",
    "gamma_limit_energy",
    "gamma_limit_energy_modified",
    "gamma_limit_subcritical",
]

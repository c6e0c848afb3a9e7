"""
Boundary double-integral form of the energy and the boundary potential.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from dipolar.evaluators.base_evaluator import BaseEvaluator, EnergyBreakdown, EvaluatorTag
from dipolar.evaluators.quadrature import (
    boundary_potential,
    cross_interaction,
    exact_sum,
    interacting_pairs,
    self_interaction,
)
from dipolar.geometry.curves import SampledCurve, sample_arclength
from dipolar.geometry.shapes import ShapeConfig
from dipolar.kernels.functions import _phi_l
from dipolar.kernels.params import KernelParams
from dipolar.utils.exceptions import GeometryError, ValidationError
from dipolar.utils.validators import validate_node_count

logger = logging.getLogger(__name__)

DEFAULT_NODES = 512


def sample_config(config: ShapeConfig, n: int = DEFAULT_NODES) -> List[SampledCurve]:
    """Arclength samples of every placed component, in component order."""
    n = validate_node_count(n)
    return [sample_arclength(c.placed_curve, n) for c in config.components]


def _require_smooth(config: ShapeConfig, what: str) -> None:
    if not config.smooth:
        raise GeometryError(
            f"{what} needs C^2 boundaries; use a rounded stripe (stripe:a,m,rho) "
            "or the ansatz formulas for sharp rectangles"
        )


def boundary_double_integral(curves: Sequence[SampledCurve], far: Sequence[bool],
                             params: KernelParams, workers: int = 1) -> float:
    """Sum over curve pairs of the double integral of nu(x).nu(y) Phi_{delta,l}(|x - y|)."""
    total = [self_interaction(curve, params, workers) for curve in curves]
    for i, j in interacting_pairs(far):
        pair = cross_interaction(curves[i], curves[j], lambda r: _phi_l(r, params), workers)
        total.append(2.0 * pair)
    return exact_sum(np.array(total))


def energy_boundary(config: ShapeConfig, params: KernelParams, n: int = DEFAULT_NODES,
                    workers: int = 1) -> EnergyBreakdown:
    """
    Energy from its boundary representation.

    total = P - (lambda / (2 |log delta|)) * sum of boundary double integrals
    of nu(x).nu(y) Phi_{delta,l}(|x - y|). Far-separated pairs contribute nothing.

    Args:
        config: Shape with C^2 components
        params: Kernel parameters
        n: Nodes per component
        workers: Threads for row chunks

    Returns:
        EnergyBreakdown tagged BOUNDARY

    Raises:
        GeometryError: For non-smooth components or touching components
    """
    if config.empty:
        return EnergyBreakdown(0.0, 0.0, EvaluatorTag.BOUNDARY, params.to_dict(), {"nodes": n})
    _require_smooth(config, "the boundary evaluator")
    curves = sample_config(config, n)
    far = [c.far for c in config.components]
    perimeter = math.fsum(curve.perimeter for curve in curves)
    if params.lam == 0:
        nonlocal_term = 0.0
    else:
        nonlocal_term = -params.prefactor * boundary_double_integral(curves, far, params, workers)
    logger.debug(f"Boundary energy: P={perimeter:.10f}, nonlocal={nonlocal_term:.10f}, n={n}")
    return EnergyBreakdown(perimeter, nonlocal_term, EvaluatorTag.BOUNDARY, params.to_dict(),
                           {"nodes": n, "components": len(curves)})


def potentials_at_nodes(curves: Sequence[SampledCurve], params: KernelParams,
                        far: Optional[Sequence[bool]] = None, workers: int = 1) -> List[np.ndarray]:
    """
    Potential v_{delta,l} at every node of every curve.

    The boundary value is (lambda / (2|log delta|)) times the principal-value flux
    of grad Phi_{delta,l} through the interacting curves, plus pi lambda / (2 delta |log delta|).
    """
    far = list(far) if far is not None else [False] * len(curves)
    if len(far) != len(curves):
        raise ValidationError("far flags must match the curves")
    if params.lam == 0:
        return [np.zeros(curve.n) for curve in curves]
    constant = math.pi / params.delta
    values = []
    for owner, curve in enumerate(curves):
        # far components only see themselves
        group = [owner] if far[owner] else [i for i in range(len(curves)) if i == owner or not far[i]]
        local = group.index(owner)
        flux = boundary_potential([curves[i] for i in group], local, params, workers)
        values.append(params.prefactor * (flux + constant))
    return values


def potential_on_boundary(x: Sequence[float], curves: Sequence[SampledCurve], params: KernelParams,
                          far: Optional[Sequence[bool]] = None, workers: int = 1) -> float:
    """
    Potential at a boundary point.

    Args:
        x: Point on a curve, within one node spacing of a node
        curves: Sampled curves of the configuration
        params: Kernel parameters
        far: Far-separation flag of each curve (all finite when omitted)
        workers: Threads for row chunks

    Returns:
        v_{delta,l} at the node nearest to x

    Raises:
        ValidationError: If x is not within one node spacing of any node
    """
    point = np.asarray(x, dtype=float)
    best = None
    for index, curve in enumerate(curves):
        dist = np.hypot(*(curve.points - point).T)
        node = int(np.argmin(dist))
        if dist[node] <= curve.spacing and (best is None or dist[node] < best[2]):
            best = (index, node, float(dist[node]))
    if best is None:
        raise ValidationError(f"point {tuple(point)} is not on a sampled boundary")
    values = potentials_at_nodes(curves, params, far, workers)
    return float(values[best[0]][best[1]])


class BoundaryEvaluator(BaseEvaluator):
    """Evaluator plug-in for the boundary double-integral form."""

    tag = EvaluatorTag.BOUNDARY

    def __init__(self, nodes: int = DEFAULT_NODES, workers: int = 1):
        super().__init__(workers)
        self.nodes = nodes

    def is_applicable(self, config: ShapeConfig, params: Optional[KernelParams]) -> bool:
        return params is not None and config.smooth

    def get_unavailable_message(self, config: ShapeConfig, params: Optional[KernelParams]) -> str:
        if params is None:
            return "BOUNDARY evaluator requires kernel parameters (--delta)"
        return "BOUNDARY evaluator needs smooth components (sharp stripes: use GRID or the ansatz)"

    def evaluate(self, config: ShapeConfig, params: Optional[KernelParams]) -> EnergyBreakdown:
        if params is None:
            raise ValidationError(self.get_unavailable_message(config, params))
        logger.info(f"Boundary evaluation: {len(config.components)} components, n={self.nodes}")
        return energy_boundary(config, params, self.nodes, self.workers)

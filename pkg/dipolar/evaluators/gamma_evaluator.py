"""
Curve-form limits of the energy as the cutoff vanishes.

``GAMMA_LIMIT`` is the critical limit of |log delta| E_{1,delta}; the modified
variant adds the smooth opposite-layer interaction, and the subcritical limit
(lambda < 1) reduces to a multiple of the perimeter.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from dipolar.evaluators.base_evaluator import BaseEvaluator, EnergyBreakdown, EvaluatorTag
from dipolar.evaluators.quadrature import (
    cross_interaction,
    exact_sum,
    gamma_self_term,
    interacting_pairs,
    min_far_distance,
)
from dipolar.geometry.curves import SampledCurve, curve_perimeter, sample_arclength
from dipolar.geometry.shapes import ShapeConfig
from dipolar.kernels.params import KernelParams, LayerSeparation, parse_ell
from dipolar.utils.exceptions import GeometryError, ResolutionError, ValidationError
from dipolar.utils.validators import validate_node_count

logger = logging.getLogger(__name__)

_PROBE_NODES = 512
_MIN_NODES = 64
_MAX_SPACING = 0.02
_CURVATURE_SPACING = 0.1
_CONTACT_FACTOR = 10.0


def required_nodes(curve: SampledCurve) -> int:
    """Smallest even n with P/n <= min(0.02, 0.1 / max|kappa|)."""
    kmax = float(np.max(np.abs(curve.curvature)))
    spacing = _MAX_SPACING if kmax == 0 else min(_MAX_SPACING, _CURVATURE_SPACING / kmax)
    n = max(_MIN_NODES, int(math.ceil(curve.perimeter / spacing)))
    return n + (n % 2)


def _resolve(config: ShapeConfig, n: Optional[int]) -> List[SampledCurve]:
    if not config.smooth:
        raise GeometryError(
            "the curve-form limit needs C^2 boundaries; sharp stripes go through the ansatz formulas"
        )
    curves = []
    for index, component in enumerate(config.components):
        probe = sample_arclength(component.placed_curve, _PROBE_NODES)
        needed = required_nodes(probe)
        nodes = needed if n is None else max(validate_node_count(n), needed)
        if n is not None and nodes > n:
            logger.debug(f"Component {index}: raising node count from {n} to {nodes}")
        curve = sample_arclength(component.placed_curve, nodes)
        contact = min_far_distance(curve)
        if contact < _CONTACT_FACTOR * curve.spacing:
            suggested = int(math.ceil(_CONTACT_FACTOR * curve.perimeter / max(contact, 1e-300)))
            raise ResolutionError(
                f"component {index} nearly touches itself (distance {contact:.3e} "
                f"at node spacing {curve.spacing:.3e})",
                hint=f"use at least n={suggested} nodes or a less pinched shape",
            )
        curves.append(curve)
    return curves


def _local_term(curves: Sequence[SampledCurve]) -> float:
    return -math.fsum(c.perimeter * (math.log(0.5 * c.perimeter) + 2.0) for c in curves)


def _nonlocal_term(curves: Sequence[SampledCurve], far: Sequence[bool], workers: int) -> float:
    parts = [gamma_self_term(curve, workers) for curve in curves]
    for i, j in interacting_pairs(far):
        parts.append(-cross_interaction(curves[i], curves[j], lambda r: 1.0 / r, workers))
    return exact_sum(np.array(parts))


def _layer_correction(curves: Sequence[SampledCurve], far: Sequence[bool], ell: float,
                      workers: int) -> float:
    def kernel(r: np.ndarray) -> np.ndarray:
        return 1.0 / np.sqrt(r * r + ell * ell)

    parts = [cross_interaction(c, c, kernel, workers, smooth_kernel=True) for c in curves]
    for i, j in interacting_pairs(far):
        parts.append(2.0 * cross_interaction(curves[i], curves[j], kernel, workers, smooth_kernel=True))
    return 0.5 * exact_sum(np.array(parts))


def gamma_limit_energy(config: ShapeConfig, n: Optional[int] = None,
                       workers: int = 1) -> EnergyBreakdown:
    """
    Critical curve-form limit energy of a configuration.

    The perimeter term carries -sum P_i (log(P_i/2) + 2); the nonlocal term the
    regularized self integrals and the cross integrals of finitely placed pairs.

    Args:
        config: Shape with C^2 components
        n: Nodes per component; raised to the curvature-based minimum when smaller
        workers: Threads for row chunks

    Raises:
        GeometryError: For non-smooth components
        ResolutionError: On near self-contact at the chosen resolution
    """
    if config.empty:
        return EnergyBreakdown(0.0, 0.0, EvaluatorTag.GAMMA_LIMIT)
    curves = _resolve(config, n)
    return _limit_from_curves(curves, [c.far for c in config.components], workers)


def _limit_from_curves(curves: Sequence[SampledCurve], far: Sequence[bool],
                       workers: int) -> EnergyBreakdown:
    local = _local_term(curves)
    nonlocal_term = _nonlocal_term(curves, far, workers)
    nodes = [c.n for c in curves]
    logger.debug(f"Gamma-limit energy: local={local:.10f}, nonlocal={nonlocal_term:.10f}, nodes={nodes}")
    return EnergyBreakdown(local, nonlocal_term, EvaluatorTag.GAMMA_LIMIT, None, {"nodes": nodes})


def gamma_limit_energy_modified(config: ShapeConfig, ell, n: Optional[int] = None,
                                workers: int = 1) -> EnergyBreakdown:
    """
    Critical limit with a finite layer separation.

    Adds (1/2) of the boundary double integral of nu(x).nu(y)/sqrt(|x - y|^2 + l^2)
    to the unmodified limit; l = inf reproduces it exactly.
    """
    ell = parse_ell(ell)
    if config.empty:
        return EnergyBreakdown(0.0, 0.0, EvaluatorTag.GAMMA_LIMIT_MODIFIED)
    curves = _resolve(config, n)
    far = [c.far for c in config.components]
    base = _limit_from_curves(curves, far, workers)
    details = dict(base.details)
    details["ell"] = str(ell) if ell is LayerSeparation.INFINITE else ell
    if ell is LayerSeparation.INFINITE:
        return EnergyBreakdown(base.perimeter_term, base.nonlocal_term,
                               EvaluatorTag.GAMMA_LIMIT_MODIFIED, None, details)
    correction = _layer_correction(curves, far, float(ell), workers)
    details["layer_correction"] = correction
    return EnergyBreakdown(base.perimeter_term, base.nonlocal_term + correction,
                           EvaluatorTag.GAMMA_LIMIT_MODIFIED, None, details)


def gamma_limit_subcritical(config: ShapeConfig, lam: float) -> EnergyBreakdown:
    """
    Subcritical limit (1 - lambda) P for 0 <= lambda < 1.

    Raises:
        ValidationError: If lambda is outside [0, 1)
    """
    if not 0.0 <= lam < 1.0:
        raise ValidationError(f"the subcritical limit needs 0 <= lambda < 1, got {lam}")
    perimeter = math.fsum(curve_perimeter(c.curve) for c in config.components)
    return EnergyBreakdown(perimeter, -lam * perimeter, EvaluatorTag.GAMMA_LIMIT_SUBCRITICAL,
                           {"lambda": lam})


class GammaLimitEvaluator(BaseEvaluator):
    """Evaluator plug-in for the critical curve-form limit; ignores kernel parameters."""

    tag = EvaluatorTag.GAMMA_LIMIT

    def __init__(self, nodes: Optional[int] = None, workers: int = 1):
        super().__init__(workers)
        self.nodes = nodes

    def is_applicable(self, config: ShapeConfig, params: Optional[KernelParams]) -> bool:
        return config.smooth

    def get_unavailable_message(self, config: ShapeConfig, params: Optional[KernelParams]) -> str:
        return f"{self.tag.value} needs smooth components (sharp stripes: use the ansatz command)"

    def evaluate(self, config: ShapeConfig, params: Optional[KernelParams]) -> EnergyBreakdown:
        return gamma_limit_energy(config, self.nodes, self.workers)


class ModifiedGammaLimitEvaluator(GammaLimitEvaluator):
    """Critical limit with the layer separation taken from the kernel parameters."""

    tag = EvaluatorTag.GAMMA_LIMIT_MODIFIED

    def evaluate(self, config: ShapeConfig, params: Optional[KernelParams]) -> EnergyBreakdown:
        ell = params.ell if params is not None else LayerSeparation.INFINITE
        return gamma_limit_energy_modified(config, ell, self.nodes, self.workers)


class SubcriticalGammaLimitEvaluator(BaseEvaluator):
    tag = EvaluatorTag.GAMMA_LIMIT_SUBCRITICAL

    def is_applicable(self, config: ShapeConfig, params: Optional[KernelParams]) -> bool:
        return params is not None and params.lam < 1.0

    def get_unavailable_message(self, config: ShapeConfig, params: Optional[KernelParams]) -> str:
        return "GAMMA_LIMIT_SUBCRITICAL needs lambda < 1"

    def evaluate(self, config: ShapeConfig, params: Optional[KernelParams]) -> EnergyBreakdown:
        if params is None:
            raise ValidationError("GAMMA_LIMIT_SUBCRITICAL requires --lambda")
        return gamma_limit_subcritical(config, params.lam)

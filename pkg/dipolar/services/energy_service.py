"""
Energy evaluation service.

Routes evaluator names to the evaluator plug-ins, runs all applicable
evaluators for cross-checking, and hosts the energy-level operations that are
not tied to one evaluator: the a-priori lower bound, rescalings, the
disk-cutting identity and the one-dimensional disk oracle.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import quad

from dipolar.evaluators.base_evaluator import BaseEvaluator, EnergyBreakdown, EvaluatorTag
from dipolar.evaluators.boundary_evaluator import BoundaryEvaluator, energy_boundary
from dipolar.evaluators.gamma_evaluator import (
    GammaLimitEvaluator,
    ModifiedGammaLimitEvaluator,
    SubcriticalGammaLimitEvaluator,
)
from dipolar.evaluators.grid_evaluator import (
    DEFAULT_DIRECT_LIMIT,
    GridEvaluator,
    ball_complement_interaction,
)
from dipolar.geometry.curves import curve_perimeter, make_disk
from dipolar.geometry.raster import RasterSet, rasterize
from dipolar.geometry.shapes import ShapeConfig
from dipolar.kernels.functions import _phi_l
from dipolar.kernels.params import KernelParams
from dipolar.utils.exceptions import DipolarError, ValidationError
from dipolar.utils.validators import validate_interval, validate_positive

logger = logging.getLogger(__name__)


@dataclass
class EnergyComparison:
    """Results of every applicable evaluator on one input."""

    results: Dict[str, EnergyBreakdown] = field(default_factory=dict)
    skipped: Dict[str, str] = field(default_factory=dict)

    @property
    def grid_boundary_delta(self) -> Optional[float]:
        """Relative difference of the GRID and BOUNDARY totals, when both ran."""
        grid = self.results.get(EvaluatorTag.GRID.value)
        boundary = self.results.get(EvaluatorTag.BOUNDARY.value)
        if grid is None or boundary is None:
            return None
        scale = max(abs(boundary.total), 1e-300)
        return abs(grid.total - boundary.total) / scale

    def to_dict(self) -> Dict:
        return {
            "results": {tag: result.to_dict() for tag, result in self.results.items()},
            "skipped": dict(self.skipped),
            "grid_boundary_delta": self.grid_boundary_delta,
        }


class EnergyService:
    """Service for routing energy evaluations to evaluator plug-ins."""

    def __init__(self, nodes: int = 512, gamma_nodes: Optional[int] = None,
                 grid_h: Optional[float] = None, workers: int = 1,
                 direct_limit: int = DEFAULT_DIRECT_LIMIT):
        """
        Initialize energy service.

        Args:
            nodes: Boundary nodes per component
            gamma_nodes: Nodes for the curve-form limits (None: curvature-based)
            grid_h: Grid spacing (None: delta/8)
            workers: Threads for pair sums
            direct_limit: Largest raster summed pairwise
        """
        self.evaluators: Dict[EvaluatorTag, BaseEvaluator] = {
            EvaluatorTag.GRID: GridEvaluator(grid_h, workers, direct_limit),
            EvaluatorTag.BOUNDARY: BoundaryEvaluator(nodes, workers),
            EvaluatorTag.GAMMA_LIMIT: GammaLimitEvaluator(gamma_nodes, workers),
            EvaluatorTag.GAMMA_LIMIT_MODIFIED: ModifiedGammaLimitEvaluator(gamma_nodes, workers),
            EvaluatorTag.GAMMA_LIMIT_SUBCRITICAL: SubcriticalGammaLimitEvaluator(workers),
        }

        # Evaluator name routing
        self.evaluator_routing = {
            "grid": EvaluatorTag.GRID,
            "boundary": EvaluatorTag.BOUNDARY,
            "gamma": EvaluatorTag.GAMMA_LIMIT,
            "gamma-limit": EvaluatorTag.GAMMA_LIMIT,
            "gamma-modified": EvaluatorTag.GAMMA_LIMIT_MODIFIED,
            "gamma-subcritical": EvaluatorTag.GAMMA_LIMIT_SUBCRITICAL,
        }
        for tag in EvaluatorTag:
            self.evaluator_routing[tag.value.lower()] = tag

    @staticmethod
    def requires_params(tag: EvaluatorTag) -> bool:
        return tag in (EvaluatorTag.GRID, EvaluatorTag.BOUNDARY, EvaluatorTag.GAMMA_LIMIT_SUBCRITICAL)

    def resolve(self, name) -> EvaluatorTag:
        """
        Map an evaluator name or tag to its tag.

        Raises:
            ValidationError: For an unknown evaluator name
        """
        if isinstance(name, EvaluatorTag):
            return name
        tag = self.evaluator_routing.get(str(name).strip().lower())
        if tag is None:
            available = sorted(self.evaluator_routing)
            raise ValidationError(f"Evaluator '{name}' not found. Available: {available}")
        return tag

    def get_available_evaluators(self, config: ShapeConfig,
                                 params: Optional[KernelParams]) -> List[EvaluatorTag]:
        return [tag for tag, ev in self.evaluators.items() if ev.is_applicable(config, params)]

    def evaluate(self, config: ShapeConfig, params: Optional[KernelParams],
                 evaluator="boundary") -> EnergyBreakdown:
        """
        Evaluate the energy with one evaluator.

        Raises:
            ValidationError: If the evaluator does not apply to the input
        """
        tag = self.resolve(evaluator)
        plugin = self.evaluators[tag]
        if not plugin.is_applicable(config, params):
            raise ValidationError(plugin.get_unavailable_message(config, params))
        result = plugin.evaluate(config, params)
        logger.info(f"{tag.value}: total={result.total:.10g}")
        return result

    def evaluate_all(self, config: ShapeConfig, params: Optional[KernelParams]) -> EnergyComparison:
        """Run every applicable evaluator; inapplicable or failing ones are recorded as skipped."""
        comparison = EnergyComparison()
        for tag, plugin in self.evaluators.items():
            if not plugin.is_applicable(config, params):
                comparison.skipped[tag.value] = plugin.get_unavailable_message(config, params)
                continue
            try:
                comparison.results[tag.value] = plugin.evaluate(config, params)
            except DipolarError as e:
                logger.warning(f"{tag.value} failed: {e}")
                comparison.skipped[tag.value] = str(e)
        delta = comparison.grid_boundary_delta
        if delta is not None:
            logger.info(f"GRID vs BOUNDARY relative difference: {delta:.3e}")
        return comparison


def lower_bound(P: float, m: float, params: KernelParams) -> float:
    """
    A-priori lower bound of the energy of any set with perimeter P and mass m.

    Raises:
        ValidationError: If P violates the isoperimetric inequality
    """
    P = validate_positive(P, "P")
    m = validate_positive(m, "m")
    if P < 2.0 * math.sqrt(math.pi * m) * (1.0 - 1e-12):
        raise ValidationError(f"perimeter {P} is below the isoperimetric minimum for mass {m}")
    lam, log_delta = params.lam, params.log_delta
    if P <= math.pi * m / params.delta:
        return (1.0 - lam + (lam / log_delta) * math.log(P / (math.e * math.pi * m))) * P
    return (1.0 - lam / log_delta) * P


def rescale_params(alpha: float, params: KernelParams, m: float) -> Tuple[KernelParams, float]:
    """
    Parameters and mass for the set alpha^{-1} Omega with the same energy up to the factor alpha.

    delta and l are divided by alpha, m by alpha^2, and lambda / |log delta| is kept.

    Raises:
        ValidationError: If delta / alpha >= 1
    """
    alpha = validate_positive(alpha, "alpha")
    m = validate_positive(m, "m", allow_zero=True)
    delta = params.delta / alpha
    if delta >= 1.0:
        raise ValidationError(f"rescaled cutoff delta/alpha = {delta:.6g} must stay below 1")
    lam = params.lam * abs(math.log(delta)) / params.log_delta
    ell = params.ell if not params.layered else params.ell_value / alpha
    return KernelParams(lam, delta, ell, wide_cutoff=True), m / alpha ** 2


def normalize_to_disk_mass(params: KernelParams, m: float) -> Tuple[KernelParams, float]:
    """Rescale so that mass m becomes pi, the mass of the unit disk."""
    m = validate_positive(m, "m")
    return rescale_params(math.sqrt(m / math.pi), params, m)


def disk_energy_delta(r: float, params: KernelParams) -> float:
    """
    Energy of the disk of radius r at finite cutoff, by adaptive quadrature.

    Uses 2 pi r - (lambda / (2|log delta|)) 2 pi r^2 int_{-pi}^{pi} cos t Phi_{delta,l}(2 r sin|t/2|) dt.
    """
    r = validate_positive(r, "r")

    def integrand(t: float) -> float:
        dist = 2.0 * r * math.sin(0.5 * t)
        return math.cos(t) * float(_phi_l(np.array([dist]), params)[0])

    inner = 2.0 * math.asin(min(1.0, params.delta / (2.0 * r)))
    near, _ = quad(integrand, 0.0, inner, limit=200)
    far = 0.0
    if inner < math.pi:
        far, _ = quad(integrand, inner, math.pi, limit=200, epsabs=1e-13, epsrel=1e-12)
    double_integral = 2.0 * math.pi * r * r * 2.0 * (near + far)
    return 2.0 * math.pi * r - params.prefactor * double_integral


def cut_disk_delta(omega: RasterSet, r: float, params: KernelParams) -> float:
    """
    Bracket deciding whether cutting the ball B_{r/2}(0) out of Omega lowers the energy.

    Returns E(B_{r/2}) + (lambda / (2|log delta|)) times the interaction of
    B_{r/2} with the complement of Omega. A negative value certifies the energy
    drop. The interaction is a lattice sum on the grid of ``omega``; the grid
    needs to resolve only the gap between the ball and the complement.

    Raises:
        ValidationError: If r/2 < delta or the ball is not inside omega
    """
    r = validate_positive(r, "r")
    radius = 0.5 * r
    if radius < params.delta:
        raise ValidationError(f"ball radius {radius:.3g} is below the cutoff {params.delta}")
    ny, nx = omega.mask.shape
    x0, y0 = omega.origin
    x1, y1 = x0 + (nx - 1) * omega.h, y0 + (ny - 1) * omega.h
    if omega.empty or x0 > -radius or y0 > -radius or x1 < radius or y1 < radius:
        raise ValidationError("ball B_{r/2}(0) is not contained in omega")
    ball = omega.disk_mask(radius)
    if not np.any(ball):
        raise ValidationError(f"grid spacing {omega.h} does not resolve the ball of radius {radius}")
    if np.any(ball & ~omega.mask):
        raise ValidationError("ball B_{r/2}(0) is not contained in omega")
    interaction = ball_complement_interaction(omega, ball, params)
    delta = disk_energy_delta(radius, params) + params.prefactor * interaction
    logger.debug(f"Cut-disk bracket at r/2={radius:.6g}: {delta:.10g}")
    return delta


def supercritical_scale(params: KernelParams) -> float:
    """Length scale delta^((lambda - 1)/lambda) above which cutting disks pays for lambda > 1."""
    if params.lam <= 1.0:
        raise ValidationError("the supercritical scale needs lambda > 1")
    return params.delta ** ((params.lam - 1.0) / params.lam)


def critical_cut_radius(params: KernelParams, ratio: float = 5.0, cells_per_radius: int = 12,
                        lo: Optional[float] = None, hi: float = 1.0,
                        rtol: float = 1e-3) -> Optional[float]:
    """
    Ball radius at which the cut-disk bracket changes sign, found by bisection in log r.

    Omega is the disk of radius ``ratio`` times the ball radius and the raster
    uses ``cells_per_radius`` cells per ball radius, so every evaluation costs
    the same.

    Returns:
        The radius, or None when the bracket has one sign on [lo, hi]
    """
    if params.lam <= 1.0:
        raise ValidationError("cutting disks only pays for lambda > 1")
    ratio = validate_interval(ratio, "ratio", 1.0, math.inf)
    lo = params.delta * 1.01 if lo is None else lo

    def bracket(radius: float) -> float:
        h = radius / cells_per_radius
        omega = rasterize(ShapeConfig.from_curves(make_disk(ratio * radius)), h)
        return cut_disk_delta(omega, 2.0 * radius, params)

    f_lo, f_hi = bracket(lo), bracket(hi)
    if f_lo * f_hi > 0:
        logger.warning(f"No sign change of the cut-disk bracket on [{lo:.3g}, {hi:.3g}]")
        return None
    a, b = math.log(lo), math.log(hi)
    while b - a > rtol:
        mid = 0.5 * (a + b)
        value = bracket(math.exp(mid))
        if (value < 0) == (f_lo < 0):
            a = mid
        else:
            b = mid
    return math.exp(0.5 * (a + b))


def energy_drop_gap(config: ShapeConfig, params: KernelParams, alpha: float,
                    n: int = 512, workers: int = 1) -> float:
    """
    Gap of the strict energy-drop inequality under enlargement by 1/alpha, alpha < 1.

    Returns [F(Omega) - c m] - alpha [F(Omega / alpha) - c m / alpha^2] with
    c = 6 pi lambda / (5 |log delta| l), which is positive.
    """
    alpha = validate_interval(alpha, "alpha", 0.0, 1.0)
    m = config.mass
    c = 0.0 if not params.layered else 6.0 * math.pi * params.lam / (5.0 * params.log_delta * params.ell_value)
    original = energy_boundary(config, params, n, workers).total - c * m
    enlarged = energy_boundary(config.dilate(1.0 / alpha), params, n, workers).total - c * m / alpha ** 2
    return original - alpha * enlarged


def rescaling_excess(config: ShapeConfig, params: KernelParams, alpha: float,
                     n: int = 512, workers: int = 1) -> Tuple[float, float]:
    """
    Energy increase alpha E(Omega/alpha) - E(Omega) for alpha > 1 and its bound.

    Returns:
        (excess, lambda log(alpha) / |log delta| * P(Omega))
    """
    alpha = validate_interval(alpha, "alpha", 1.0, math.inf)
    base = energy_boundary(config, params, n, workers)
    shrunk = energy_boundary(config.dilate(1.0 / alpha), params, n, workers)
    perimeter = math.fsum(curve_perimeter(c.curve) for c in config.components)
    bound = params.lam * math.log(alpha) / params.log_delta * perimeter
    return alpha * shrunk.total - base.total, bound

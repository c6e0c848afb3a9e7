"""
Area-preserving shape gradient flow and circle-rigidity diagnostics.

A flow state is a node set on one closed curve. Every step moves the nodes
along the outward normal with velocity V = -(kappa + 2 v - mu), refits a
Fourier curve through the moved nodes and dilates it about its centroid to
the initial area.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from dipolar.evaluators.base_evaluator import EvaluatorTag
from dipolar.evaluators.boundary_evaluator import energy_boundary, potentials_at_nodes
from dipolar.evaluators.grid_evaluator import GridEvaluator
from dipolar.geometry.curves import (
    JordanCurve,
    SampledCurve,
    polyline_self_intersects,
    sample_arclength,
    sample_parameter,
)
from dipolar.geometry.shapes import ShapeConfig
from dipolar.kernels.params import KernelParams
from dipolar.utils.exceptions import FlowAbortedError, GeometryError, ValidationError
from dipolar.utils.validators import validate_node_count, validate_positive

logger = logging.getLogger(__name__)

RESAMPLE_EVERY = 10
MAX_HALVINGS = 30
_ENERGY_SLACK = 1e-12
_DIAGNOSTIC_NODES = 512


@dataclass
class FlowState:
    """Current curve of a gradient flow and its history."""

    curve: SampledCurve
    step: int = 0
    dt: float = 0.0
    mu: float = 0.0
    energy_trace: List[float] = field(default_factory=list)
    residual_trace: List[float] = field(default_factory=list)
    area_trace: List[float] = field(default_factory=list)
    dt_trace: List[float] = field(default_factory=list)
    converged: bool = False
    stop_reason: str = ""

    @property
    def jordan(self) -> JordanCurve:
        return self.curve.curve

    @property
    def energy(self) -> float:
        return self.energy_trace[-1] if self.energy_trace else math.nan

    @property
    def residual(self) -> float:
        return self.residual_trace[-1] if self.residual_trace else math.nan

    def trace_rows(self) -> List[Dict[str, Any]]:
        return [
            {"step": i, "energy": e, "residual": r, "area": a, "dt": d}
            for i, (e, r, a, d) in enumerate(
                zip(self.energy_trace, self.residual_trace, self.area_trace, self.dt_trace)
            )
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "dt": self.dt,
            "mu": self.mu,
            "energy": self.energy,
            "residual": self.residual,
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "shape": ShapeConfig.from_curves(self.jordan).to_dict(),
        }


def shape_gradient(curve: SampledCurve, params: KernelParams,
                   workers: int = 1) -> Tuple[np.ndarray, float]:
    """
    Normal velocity of steepest area-preserving descent at every node.

    Args:
        curve: Sampled simple closed curve
        params: Kernel parameters
        workers: Threads for the potential

    Returns:
        (V, mu) with V = -(kappa + 2 v - mu) and mu the ds-weighted mean of kappa + 2 v

    Raises:
        GeometryError: If the node polygon self-intersects
    """
    if polyline_self_intersects(curve.points):
        raise GeometryError("curve is self-intersecting")
    potential = potentials_at_nodes([curve], params, workers=workers)[0]
    first_variation = curve.curvature + 2.0 * potential
    mu = float(np.dot(first_variation, curve.ds) / np.sum(curve.ds))
    return -(first_variation - mu), mu


def _energy_function(tag: EvaluatorTag, params: KernelParams, n: int,
                     workers: int) -> Callable[[JordanCurve], float]:
    if tag is EvaluatorTag.BOUNDARY:
        return lambda c: energy_boundary(ShapeConfig.from_curves(c), params, n, workers).total
    if tag is EvaluatorTag.GRID:
        grid = GridEvaluator(workers=workers)
        return lambda c: grid.evaluate(ShapeConfig.from_curves(c), params).total
    raise ValidationError(f"gradient flow cannot use the {tag.value} energy")


def _fit(points: np.ndarray, n: int, area: float) -> JordanCurve:
    curve = JordanCurve.from_samples(points, n_modes=n // 3, filter_order=16)
    current = curve.signed_area
    if current <= 0:
        raise GeometryError("flow step reversed the curve orientation")
    return curve.dilate(math.sqrt(area / current), center=curve.centroid())


def gradient_flow(initial: ShapeConfig, params: KernelParams,
                  energy: Union[str, EvaluatorTag] = EvaluatorTag.BOUNDARY,
                  max_steps: int = 2000, dt0: Optional[float] = None, tol: float = 1e-3,
                  n: int = 128, workers: int = 1,
                  on_step: Optional[Callable[[FlowState], None]] = None) -> FlowState:
    """
    Run the area-preserving gradient flow from a single smooth curve.

    Steps are explicit Euler with backtracking: dt is halved until the energy
    does not increase, and grows back towards dt0 after accepted steps. Nodes
    are redistributed by arclength every ten steps.

    Args:
        initial: Single-component smooth shape
        params: Kernel parameters
        energy: Energy used for the line search (BOUNDARY or GRID)
        max_steps: Step limit
        dt0: Initial time step (default 0.2 * (P/n)^2)
        tol: Stop when max |kappa + 2 v - mu| <= tol
        n: Node count
        workers: Threads for pair sums
        on_step: Called with the state after every accepted step

    Returns:
        The final FlowState

    Raises:
        ValidationError: If the input is not one finitely placed smooth component
        FlowAbortedError: On self-intersection; carries the last valid state
    """
    if len(initial.components) != 1 or initial.components[0].far or not initial.smooth:
        raise ValidationError("gradient flow needs exactly one finitely placed smooth component")
    try:
        tag = EvaluatorTag(energy.upper()) if isinstance(energy, str) else EvaluatorTag(energy)
    except ValueError:
        raise ValidationError(f"unknown flow energy {energy!r}")
    n = validate_node_count(n)
    tol = validate_positive(tol, "tol")
    energy_of = _energy_function(tag, params, n, workers)

    jordan = initial.single_curve
    area = jordan.signed_area
    sampled = sample_arclength(jordan, n)
    dt0 = validate_positive(dt0, "dt0") if dt0 is not None else 0.2 * (sampled.perimeter / n) ** 2
    state = FlowState(curve=sampled, dt=dt0)
    current_energy = energy_of(jordan)
    logger.info(f"Gradient flow: n={n}, dt0={dt0:.3e}, tol={tol:g}, E0={current_energy:.10g}")

    while True:
        try:
            velocity, mu = shape_gradient(state.curve, params, workers)
        except GeometryError as e:
            raise FlowAbortedError(f"flow aborted at step {state.step}: {e}", state)
        residual = float(np.max(np.abs(velocity)))
        state.mu = mu
        state.energy_trace.append(current_energy)
        state.residual_trace.append(residual)
        state.area_trace.append(state.jordan.signed_area)
        state.dt_trace.append(state.dt)
        if on_step is not None:
            on_step(state)
        if residual <= tol:
            state.converged = True
            state.stop_reason = "converged"
            break
        if state.step >= max_steps:
            state.stop_reason = "max_steps"
            break

        dt = state.dt
        accepted = None
        crossings = 0
        for _ in range(MAX_HALVINGS):
            moved = state.curve.points + dt * velocity[:, None] * state.curve.normals
            if polyline_self_intersects(moved):
                crossings += 1
                dt *= 0.5
                continue
            try:
                candidate = _fit(moved, n, area)
                trial = energy_of(candidate)
            except GeometryError:
                crossings += 1
                dt *= 0.5
                continue
            if trial <= current_energy + _ENERGY_SLACK * max(1.0, abs(current_energy)):
                accepted = (candidate, trial)
                break
            dt *= 0.5
        if accepted is None:
            if crossings == MAX_HALVINGS:
                raise FlowAbortedError(f"self-intersection at step {state.step}", state)
            logger.warning(f"Backtracking exhausted at step {state.step}; stopping")
            state.stop_reason = "stalled"
            break

        candidate, current_energy = accepted
        state.step += 1
        if state.step % RESAMPLE_EVERY == 0:
            sampled = sample_arclength(candidate, n)
        else:
            sampled = sample_parameter(candidate, n)
        state.curve = sampled
        state.dt = min(dt0, 2.0 * dt)
        logger.debug(f"step {state.step}: E={current_energy:.12g}, residual={residual:.3e}, dt={dt:.3e}")

    logger.info(f"Gradient flow finished after {state.step} steps ({state.stop_reason}), "
                f"E={state.energy:.10g}, residual={state.residual:.3e}")
    return state


def _as_sampled(curve: Union[SampledCurve, JordanCurve]) -> SampledCurve:
    if isinstance(curve, SampledCurve):
        return curve
    return sample_arclength(curve, _DIAGNOSTIC_NODES)


def osc_curvature(curve: Union[SampledCurve, JordanCurve]) -> float:
    """max kappa - min kappa over the nodes."""
    sampled = _as_sampled(curve)
    return float(np.max(sampled.curvature) - np.min(sampled.curvature))


@dataclass
class RigidityReport:
    """Distance of an arclength-parametrized curve to its fitted circle of equal perimeter."""

    osc_kappa: float
    radius: float
    position_error: float
    tangent_error: float
    position_bound: float
    tangent_bound: float

    @property
    def holds(self) -> bool:
        slack = 1e-9 * max(1.0, self.radius)
        return (self.position_error <= self.position_bound + slack
                and self.tangent_error <= self.tangent_bound + slack)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "osc_kappa": self.osc_kappa,
            "radius": self.radius,
            "position_error": self.position_error,
            "tangent_error": self.tangent_error,
            "position_bound": self.position_bound,
            "tangent_bound": self.tangent_bound,
            "holds": self.holds,
        }


def circle_rigidity_check(curve: Union[SampledCurve, JordanCurve]) -> RigidityReport:
    """
    Compare a curve with the circle of radius P/(2 pi) at the best phase and translation.

    The position error is bounded by (P^2/4) osc kappa and the tangent error by
    (P/2) osc kappa.
    """
    sampled = _as_sampled(curve)
    if not sampled.uniform:
        sampled = sample_arclength(sampled.curve, sampled.n)
    perimeter = sampled.perimeter
    radius = perimeter / (2.0 * math.pi)
    theta = sampled.arclength / radius
    z = sampled.points[:, 0] + 1j * sampled.points[:, 1]
    center = np.mean(z)
    phase = np.angle(np.sum((z - center) * np.exp(-1j * theta)))
    circle = center + radius * np.exp(1j * (theta + phase))
    circle_tangent = 1j * np.exp(1j * (theta + phase))
    tangent = sampled.tangents[:, 0] + 1j * sampled.tangents[:, 1]
    osc = osc_curvature(sampled)
    return RigidityReport(
        osc_kappa=osc,
        radius=radius,
        position_error=float(np.max(np.abs(z - circle))),
        tangent_error=float(np.max(np.abs(tangent - circle_tangent))),
        position_bound=0.25 * perimeter ** 2 * osc,
        tangent_bound=0.5 * perimeter * osc,
    )


def hausdorff_to_circle(curve: Union[SampledCurve, JordanCurve]) -> float:
    """Radial deviation from the circle centered at the node mean with the mean radius."""
    sampled = _as_sampled(curve)
    center = sampled.points.mean(axis=0)
    distances = np.hypot(*(sampled.points - center).T)
    return float(np.max(np.abs(distances - distances.mean())))

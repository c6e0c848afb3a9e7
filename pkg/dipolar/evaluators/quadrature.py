"""
Boundary double integrals with a logarithmically singular diagonal.

Self interactions subtract the periodic model Phi_delta(|s|) cos^2(pi s / P),
whose integral over (-P/2, P/2) is known in closed form, and sum the smooth
remainder with the trapezoid rule in the curve parameter. When the cutoff is
below the node spacing the remainder has a kink at s = 0; the first
Euler-Maclaurin term removes its O(h^2) error.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, List, Sequence

import numpy as np
from scipy.special import sici

from dipolar.geometry.curves import SampledCurve
from dipolar.kernels.functions import _dphi, _layer, _phi
from dipolar.kernels.params import KernelParams
from dipolar.utils.exceptions import GeometryError

logger = logging.getLogger(__name__)

_ROWS_PER_CHUNK = 128
_SERIES_TERMS = 40
_EULER_GAMMA = 0.5772156649015329


def map_rows(n: int, func: Callable[[slice], np.ndarray], workers: int = 1) -> np.ndarray:
    """Evaluate ``func`` on row chunks in order and concatenate the results."""
    chunks = [slice(lo, min(lo + _ROWS_PER_CHUNK, n)) for lo in range(0, n, _ROWS_PER_CHUNK)]
    if workers <= 1 or len(chunks) == 1:
        parts = [func(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(func, chunks))
    return np.concatenate(parts) if parts else np.zeros(0)


def exact_sum(values: np.ndarray) -> float:
    """Correctly rounded sum, independent of chunking and worker count."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def _wrap(s: np.ndarray, perimeter: float) -> np.ndarray:
    return (s + 0.5 * perimeter) % perimeter - 0.5 * perimeter


def _window(s: np.ndarray, perimeter: float) -> np.ndarray:
    return np.cos(math.pi * s / perimeter) ** 2


def _cos_moment(length: float, delta: float, k: float) -> float:
    """int_0^L (1 - log(s/delta)) cos(k s) ds by its power series (k L <= pi)."""
    total = 0.0
    log_ratio = math.log(length / delta)
    for n in range(_SERIES_TERMS):
        p = 2 * n
        power = length ** (p + 1) / (p + 1)
        moment = power * (1.0 - log_ratio) + power / (p + 1)
        term = (-1) ** n * k ** p / math.factorial(p) * moment
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


@lru_cache(maxsize=1024)
def windowed_phi_integral(perimeter: float, delta: float) -> float:
    """int_{-P/2}^{P/2} Phi_delta(|s|) cos^2(pi s/P) ds."""
    k = 2.0 * math.pi / perimeter
    length = min(delta, 0.5 * perimeter)
    inner = (length * (2.0 - math.log(length / delta)) + _cos_moment(length, delta, k)) / delta
    if delta >= 0.5 * perimeter:
        return inner
    ci_half = sici(math.pi)[1]
    ci_delta = sici(k * delta)[1]
    return inner + math.log(perimeter / (2.0 * delta)) + ci_half - ci_delta


@lru_cache(maxsize=1024)
def windowed_slope_integral(perimeter: float, delta: float) -> float:
    """int_{-P/2}^{P/2} (1/2)|s| Phi_delta'(|s|) cos^2(pi s/P) ds (negative)."""
    length = min(delta, 0.5 * perimeter)
    inner = (0.5 * length + perimeter / (4.0 * math.pi) * math.sin(2.0 * math.pi * length / perimeter)) / delta
    if delta >= 0.5 * perimeter:
        return -inner
    k = 2.0 * math.pi / perimeter
    outer = 0.5 * (math.log(perimeter / (2.0 * delta)) + sici(math.pi)[1] - sici(k * delta)[1])
    return -(inner + outer)


def cin_pi() -> float:
    """int_{-P/2}^{P/2} sin^2(pi s/P)/|s| ds, independent of P."""
    return _EULER_GAMMA + math.log(math.pi) - sici(math.pi)[1]


def _pair_geometry(curve: SampledCurve, rows: slice, other: SampledCurve):
    diff = other.points[None, :, :] - curve.points[rows, None, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    dots = curve.normals[rows] @ other.normals.T
    return diff, dist, dots


def self_interaction(curve: SampledCurve, params: KernelParams, workers: int = 1) -> float:
    """
    Self term of the boundary double integral of nu(x).nu(y) Phi_{delta,l}(|x - y|).

    Args:
        curve: Sampled closed curve
        params: Kernel parameters
        workers: Thread count for row chunks

    Returns:
        The double integral over curve x curve
    """
    perimeter, delta = curve.perimeter, params.delta
    model_integral = windowed_phi_integral(perimeter, delta)
    ds = curve.ds
    n = curve.n

    def rows(chunk: slice) -> np.ndarray:
        idx = np.arange(n)[chunk]
        _, dist, dots = _pair_geometry(curve, chunk, curve)
        s = _wrap(curve.arclength[None, :] - curve.arclength[idx, None], perimeter)
        diagonal = np.zeros_like(dist, dtype=bool)
        diagonal[np.arange(idx.size), idx] = True
        safe_dist = np.where(diagonal, 1.0, dist)
        safe_s = np.where(diagonal, 1.0, np.abs(s))
        if np.any(safe_dist <= 0):
            raise GeometryError("coincident nodes on one curve")
        remainder = dots * _phi(safe_dist, delta) - _phi(safe_s, delta) * _window(s, perimeter)
        remainder[diagonal] = 0.0
        row = remainder @ ds + model_integral
        h = ds[idx]
        kink = delta < h
        correction = (h * h / 12.0) * 2.0 * (
            (math.pi / perimeter) ** 2 - (11.0 / 24.0) * curve.curvature[idx] ** 2
        )
        row = row + np.where(kink, correction, 0.0)
        if params.layered:
            row = row - (dots * _layer(dist, params)) @ ds
        return row * h

    return exact_sum(map_rows(n, rows, workers))


def cross_interaction(first: SampledCurve, second: SampledCurve,
                      kernel: Callable[[np.ndarray], np.ndarray], workers: int = 1,
                      smooth_kernel: bool = False) -> float:
    """
    Double integral of nu(x).nu(y) kernel(|x - y|) over two curves.

    Distinct curves must be disjoint unless ``smooth_kernel`` says the kernel
    is bounded at r = 0 (then a curve may be paired with itself).

    Raises:
        GeometryError: If the curves share a point and the kernel is singular
    """

    def rows(chunk: slice) -> np.ndarray:
        _, dist, dots = _pair_geometry(first, chunk, second)
        if not smooth_kernel and np.any(dist <= 1e-14):
            raise GeometryError("coincident points between distinct components")
        return ((dots * kernel(dist)) @ second.ds) * first.ds[chunk]

    return exact_sum(map_rows(first.n, rows, workers))


def gamma_self_term(curve: SampledCurve, workers: int = 1) -> float:
    """Half the integral of (1/|s| - nu.nu/|x - y|) over the curve x the arclength offset."""
    perimeter = curve.perimeter
    ds = curve.ds
    n = curve.n
    offset = cin_pi()

    def rows(chunk: slice) -> np.ndarray:
        idx = np.arange(n)[chunk]
        _, dist, dots = _pair_geometry(curve, chunk, curve)
        s = _wrap(curve.arclength[None, :] - curve.arclength[idx, None], perimeter)
        diagonal = np.zeros_like(dist, dtype=bool)
        diagonal[np.arange(idx.size), idx] = True
        safe_dist = np.where(diagonal, 1.0, dist)
        safe_s = np.where(diagonal, 1.0, np.abs(s))
        if np.any(safe_dist <= 0):
            raise GeometryError("coincident nodes on one curve")
        integrand = _window(s, perimeter) / safe_s - dots / safe_dist
        integrand[diagonal] = 0.0
        h = ds[idx]
        kink = (h * h / 12.0) * 2.0 * (
            (11.0 / 24.0) * curve.curvature[idx] ** 2 - (math.pi / perimeter) ** 2
        )
        return (integrand @ ds + kink + offset) * h

    return 0.5 * exact_sum(map_rows(n, rows, workers))


def min_far_distance(curve: SampledCurve) -> float:
    """Smallest node distance over pairs more than a quarter perimeter apart along the curve."""
    perimeter = curve.perimeter
    best = math.inf
    for lo in range(0, curve.n, _ROWS_PER_CHUNK):
        chunk = slice(lo, min(lo + _ROWS_PER_CHUNK, curve.n))
        _, dist, _ = _pair_geometry(curve, chunk, curve)
        s = _wrap(curve.arclength[None, :] - curve.arclength[chunk, None], perimeter)
        far = np.abs(s) > 0.25 * perimeter
        if np.any(far):
            best = min(best, float(np.min(dist[far])))
    return best


def boundary_potential(curves: Sequence[SampledCurve], owner: int, params: KernelParams,
                       workers: int = 1) -> np.ndarray:
    """
    Principal-value flux of grad Phi_{delta,l} through all finite curves, at the nodes of one curve.

    The own-curve integral subtracts the model (kappa/2)|s| Phi_delta'(|s|) cos^2(pi s/P),
    integrated in closed form.
    """
    curve = curves[owner]
    perimeter, delta = curve.perimeter, params.delta
    slope_integral = windowed_slope_integral(perimeter, delta)
    n = curve.n

    def own_rows(chunk: slice) -> np.ndarray:
        idx = np.arange(n)[chunk]
        diff, dist, _ = _pair_geometry(curve, chunk, curve)
        s = _wrap(curve.arclength[None, :] - curve.arclength[idx, None], perimeter)
        diagonal = np.zeros_like(dist, dtype=bool)
        diagonal[np.arange(idx.size), idx] = True
        safe_dist = np.where(diagonal, 1.0, dist)
        safe_s = np.where(diagonal, 1.0, np.abs(s))
        flux = np.einsum("ijk,jk->ij", diff, curve.normals)
        gradient = _dphi(safe_dist, delta) * flux / safe_dist
        model = 0.5 * curve.curvature[idx, None] * safe_s * _dphi(safe_s, delta) * _window(s, perimeter)
        remainder = gradient - model
        remainder[diagonal] = 0.0
        row = remainder @ curve.ds + curve.curvature[idx] * slope_integral
        if params.layered:
            layered = flux / (dist * dist + params.ell_value ** 2) ** 1.5
            row = row + layered @ curve.ds
        return row

    total = map_rows(n, own_rows, workers)
    for index, other in enumerate(curves):
        if index == owner:
            continue
        total = total + _foreign_flux(curve, other, params, workers)
    return total


def _foreign_flux(curve: SampledCurve, other: SampledCurve, params: KernelParams,
                  workers: int) -> np.ndarray:
    def rows(chunk: slice) -> np.ndarray:
        diff, dist, _ = _pair_geometry(curve, chunk, other)
        if np.any(dist <= 1e-14):
            raise GeometryError("coincident points between distinct components")
        flux = np.einsum("ijk,jk->ij", diff, other.normals)
        values = _dphi(dist, params.delta) * flux / dist
        if params.layered:
            values = values + flux / (dist * dist + params.ell_value ** 2) ** 1.5
        return values @ other.ds

    return map_rows(curve.n, rows, workers)


def interacting_pairs(far: Sequence[bool]) -> List[tuple]:
    """Pairs (i, j), i < j, of components that interact (both finitely placed)."""
    return [(i, j) for i in range(len(far)) for j in range(i + 1, len(far))
            if not far[i] and not far[j]]

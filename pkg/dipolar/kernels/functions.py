"""
Scalar kernels of the dipolar energy.

All functions accept scalars or numpy arrays and return the same shape.
Singular kernels reject r <= 0; the underscored variants skip validation and
are used by the evaluators on arrays already known to be positive.
"""

import math
from typing import Union

import numpy as np

from dipolar.kernels.params import KernelParams
from dipolar.utils.validators import validate_positive, validate_radii
from dipolar.utils.exceptions import ValidationError

ArrayLike = Union[float, np.ndarray]


def _out(values: np.ndarray, like) -> ArrayLike:
    return float(values) if np.ndim(like) == 0 else values


def _phi(r: np.ndarray, delta: float) -> np.ndarray:
    inner = (1.0 - np.log(np.minimum(r, delta) / delta)) / delta
    return np.where(r >= delta, 1.0 / np.maximum(r, delta), inner)


def _dphi(r: np.ndarray, delta: float) -> np.ndarray:
    return np.where(r >= delta, -1.0 / np.maximum(r, delta) ** 2, -1.0 / (delta * r))


def _layer(r: np.ndarray, params: KernelParams) -> np.ndarray:
    """1/sqrt(r^2 + l^2); zero for an infinite layer separation."""
    if not params.layered:
        return np.zeros_like(r)
    return 1.0 / np.sqrt(r * r + params.ell_value ** 2)


def _layer_kernel(r: np.ndarray, params: KernelParams) -> np.ndarray:
    """(r^2 - 2 l^2) / (r^2 + l^2)^(5/2), smooth at r = 0."""
    if not params.layered:
        return np.zeros_like(r)
    l2 = params.ell_value ** 2
    return (r * r - 2.0 * l2) / (r * r + l2) ** 2.5


def _phi_l(r: np.ndarray, params: KernelParams) -> np.ndarray:
    return _phi(r, params.delta) - _layer(r, params)


def _kernel(r: np.ndarray, params: KernelParams) -> np.ndarray:
    safe = np.maximum(r, params.delta)
    cut = np.where(r > params.delta, 1.0 / safe ** 3, 0.0)
    return cut - _layer_kernel(r, params)


def g_cutoff(r: ArrayLike, delta: float) -> ArrayLike:
    """Indicator cutoff: 1 where r > delta, else 0."""
    delta = validate_positive(delta, "delta")
    radii = np.asarray(r, dtype=float)
    if np.any(radii < 0):
        raise ValidationError("r must be nonnegative")
    return _out((radii > delta).astype(float), r)


def phi_delta(r: ArrayLike, delta: float) -> ArrayLike:
    """
    Radial potential Phi_delta with Laplacian g_delta(r)/r^3.

    Returns 1/r for r >= delta and (1 - log(r/delta))/delta below.
    """
    delta = validate_positive(delta, "delta")
    return _out(_phi(validate_radii(r), delta), r)


def phi_delta_prime(r: ArrayLike, delta: float) -> ArrayLike:
    delta = validate_positive(delta, "delta")
    return _out(_dphi(validate_radii(r), delta), r)


def kernel_K(r: ArrayLike, params: KernelParams) -> ArrayLike:
    """Cut-off dipolar kernel minus the opposite-layer term."""
    return _out(_kernel(validate_radii(r), params), r)


def phi_delta_l(r: ArrayLike, params: KernelParams) -> ArrayLike:
    return _out(_phi_l(validate_radii(r), params), r)


def kernel_total_mass(params: KernelParams) -> float:
    """Integral of K over the plane; the layer term integrates to zero."""
    return 2.0 * math.pi / params.delta


def kernel_mass_within(radius: float, params: KernelParams) -> float:
    """
    Integral of K over the disk of the given radius around the origin.

    Args:
        radius: Disk radius (>= delta)
        params: Kernel parameters

    Returns:
        2 pi (1/delta - 1/R) + 2 pi R^2/(R^2 + l^2)^(3/2)
    """
    radius = validate_positive(radius, "radius")
    if radius < params.delta:
        raise ValidationError("radius must be >= delta")
    mass = 2.0 * math.pi * (1.0 / params.delta - 1.0 / radius)
    if params.layered:
        mass += 2.0 * math.pi * radius ** 2 / (radius ** 2 + params.ell_value ** 2) ** 1.5
    return mass


def kernel_is_repulsive(params: KernelParams) -> bool:
    """True when K is positive for every r > 0 (l infinite or delta < sqrt(2) l)."""
    return (not params.layered) or params.delta < math.sqrt(2.0) * params.ell_value

"""
Closed-form energies of disks and stripes.

Disks use complete elliptic integrals in the parameter convention
(``elliptic_K(k) = K(m = k)``). Stripes S_{a,m} are rectangles of side
lengths a m (long side) and 1/a, so |S_{a,m}| = m.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.integrate import quad

from dipolar.kernels.elliptic import elliptic_E, elliptic_E_m1, elliptic_K, elliptic_K_m1
from dipolar.kernels.functions import _phi_l
from dipolar.kernels.params import Ell, KernelParams, LayerSeparation, parse_ell
from dipolar.utils.exceptions import ValidationError
from dipolar.utils.validators import validate_interval, validate_positive

logger = logging.getLogger(__name__)

LOG4 = math.log(4.0)


class AnsatzShape(str, enum.Enum):
    DISK = "DISK"
    STRIPE = "STRIPE"


@dataclass
class AnsatzResult:
    """Energy of one ansatz shape in the critical limit."""

    shape: AnsatzShape
    parameters: Dict[str, float]
    ell: Ell
    energy: float
    mass: float
    energy_per_mass: float = field(init=False)

    def __post_init__(self):
        self.shape = AnsatzShape(self.shape)
        self.energy_per_mass = self.energy / self.mass

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shape": self.shape.value,
            "parameters": dict(self.parameters),
            "ell": str(self.ell) if self.ell is LayerSeparation.INFINITE else self.ell,
            "energy": self.energy,
            "mass": self.mass,
            "energy_per_mass": self.energy_per_mass,
        }


def _finite_ell(ell) -> float:
    value = parse_ell(ell)
    if value is LayerSeparation.INFINITE:
        raise ValidationError("a finite layer separation ell is required")
    return float(value)


def _elliptic_bracket(q: float) -> float:
    """
    ((2 + q) K(4/(4+q)) - (4 + q) E(4/(4+q))) / sqrt(4 + q) for q = alpha^2 > 0.

    The integrals take the complement q/(4+q) directly; forming 4/(4+q) first
    rounds to 1 for q below machine epsilon.
    """
    p = q / (4.0 + q)
    return ((2.0 + q) * elliptic_K_m1(p) - (4.0 + q) * elliptic_E_m1(p)) / math.sqrt(4.0 + q)


def disk_energy_gamma(r: float, ell=LayerSeparation.INFINITE) -> float:
    """
    Critical-limit energy of the disk of radius r with layer separation ell.

    The elliptic term vanishes for ell = inf.
    """
    r = validate_positive(r, "r")
    ell = parse_ell(ell)
    energy = -2.0 * math.pi * r * LOG4 - 2.0 * math.pi * r * math.log(r)
    if ell is not LayerSeparation.INFINITE:
        energy += 2.0 * math.pi * r * _elliptic_bracket((float(ell) / r) ** 2)
    return energy


def f_disk(a: float, ell) -> float:
    """Energy per mass of the disk of radius 1/a."""
    a = validate_positive(a, "a")
    ell = _finite_ell(ell)
    return 2.0 * a * (-LOG4 + math.log(a) + _elliptic_bracket((a * ell) ** 2))


def g_alpha(alpha: float) -> float:
    """Scale-free disk function g with f_disk(a) = (g(a l) - 2 a l log l) / l."""
    alpha = validate_positive(alpha, "alpha")
    return 2.0 * alpha * (math.log(alpha / 4.0) + _elliptic_bracket(alpha * alpha))


def g_second(alpha: float) -> float:
    """Second derivative of g; positive on (0, inf)."""
    alpha = validate_positive(alpha, "alpha")
    a2 = alpha * alpha
    p = a2 / (4.0 + a2)
    root = (4.0 + a2) ** 1.5
    numerator = (root - 2.0 * (4.0 + 7.0 * a2 + a2 * a2) * elliptic_E_m1(p)
                 + 2.0 * a2 * (5.0 + a2) * elliptic_K_m1(p))
    return 2.0 * numerator / (alpha * root)


def h1(t: float) -> float:
    t = validate_interval(t, "t", 0.0, 1.0, closed_low=True)
    return math.sqrt(t) + (-4.0 + t + 2.0 * t * t) * elliptic_E(t) - (-4.0 + 3.0 * t + t * t) * elliptic_K(t)


def h2(t: float) -> float:
    t = validate_interval(t, "t", 0.0, 1.0, closed_low=True)
    return t - (4.0 - t - 2.0 * t * t) * elliptic_E(t) + (4.0 - 3.0 * t - t * t) * elliptic_K(t)


def h2_majorant(t: float) -> float:
    """1 + 7E(t) - (4 + 5t)K(t)/2; negative at t = 0.85 and decreasing beyond."""
    t = validate_interval(t, "t", 0.0, 1.0, closed_low=True)
    return 1.0 + 7.0 * elliptic_E(t) - 0.5 * (4.0 + 5.0 * t) * elliptic_K(t)


def alpha_of_t(t: float) -> float:
    """alpha(t) = 2 sqrt((1 - t)/t), the inverse of t = 4/(4 + alpha^2)."""
    t = validate_interval(t, "t", 0.0, 1.0, closed_high=True)
    return 2.0 * math.sqrt((1.0 - t) / t)


def _arcoth(x: float) -> float:
    if not x > 1.0:
        raise ValidationError(f"arcoth needs x > 1, got {x}")
    return 0.5 * math.log((x + 1.0) / (x - 1.0))


def stripe_energy_gamma(a: float, m: float) -> float:
    """Exact critical-limit energy of the stripe S_{a,m} at finite mass."""
    a = validate_positive(a, "a")
    m = validate_positive(m, "m")
    length, width = a * m, 1.0 / a
    root = math.sqrt(1.0 + a ** 4 * m * m)
    i2 = (2.0 - 2.0 * root) / a + 2.0 * length * math.asinh(a * a * m)
    i4 = 2.0 * (a * a * m - root + _arcoth(root)) / a
    local = -2.0 * length * math.log(length) - 2.0 * length - 2.0 * width * math.log(width) - 2.0 * width
    return local + i2 + i4


def f_stripe(a: float, ell) -> float:
    """Large-mass limit of the modified stripe energy per mass."""
    a = validate_positive(a, "a")
    ell = _finite_ell(ell)
    return 2.0 * a * math.log(2.0 * a / ell) - 4.0 * a + a * math.log(1.0 / (a * a) + ell * ell)


def _segment_pair(length: float, width: float) -> float:
    """Integral of 1/sqrt((s - t)^2 + width^2) over [0, L]^2."""
    return 2.0 * (length * math.asinh(length / width) - math.hypot(length, width) + width)


def stripe_layer_correction(a: float, m: float, ell) -> float:
    """
    Half the boundary double integral of nu(x).nu(y)/sqrt(|x - y|^2 + l^2) over S_{a,m}.

    Only parallel sides interact; same-side pairs count with +1 and opposite
    sides with -1.
    """
    a = validate_positive(a, "a")
    m = validate_positive(m, "m")
    ell = _finite_ell(ell)
    length, width = a * m, 1.0 / a
    long_sides = _segment_pair(length, ell) - _segment_pair(length, math.hypot(width, ell))
    short_sides = _segment_pair(width, ell) - _segment_pair(width, math.hypot(length, ell))
    return long_sides + short_sides


def stripe_energy_modified(a: float, m: float, ell) -> float:
    """Critical-limit stripe energy with a finite layer separation."""
    return stripe_energy_gamma(a, m) + stripe_layer_correction(a, m, ell)


def _line_integral(length: float, offset: float, params: KernelParams) -> float:
    """2 int_0^L (L - u) Phi_{delta,l}(sqrt(u^2 + offset^2)) du."""

    def integrand(u: float) -> float:
        r = math.hypot(u, offset)
        return (length - u) * float(_phi_l(np.array([r]), params)[0])

    breaks = [0.0]
    if offset < params.delta:
        inside = math.sqrt(params.delta ** 2 - offset ** 2)
        if inside < length:
            breaks.append(inside)
    breaks.append(length)
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        value, _ = quad(integrand, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)
        total += value
    return 2.0 * total


def stripe_energy_delta(a: float, m: float, params: KernelParams) -> float:
    """
    Finite-cutoff energy of the sharp stripe S_{a,m}.

    Perpendicular sides do not interact (nu.nu = 0), so the boundary double
    integral reduces to one-dimensional integrals over pairs of parallel sides.
    """
    a = validate_positive(a, "a")
    m = validate_positive(m, "m")
    length, width = a * m, 1.0 / a
    perimeter = 2.0 * (length + width)
    if params.lam == 0:
        return perimeter
    double_integral = 2.0 * (
        _line_integral(length, 0.0, params) - _line_integral(length, width, params)
        + _line_integral(width, 0.0, params) - _line_integral(width, length, params)
    )
    return perimeter - params.prefactor * double_integral


def disk_result(r: float, ell=LayerSeparation.INFINITE) -> AnsatzResult:
    ell = parse_ell(ell)
    return AnsatzResult(AnsatzShape.DISK, {"r": r}, ell, disk_energy_gamma(r, ell), math.pi * r * r)


def stripe_result(a: float, m: float, ell=LayerSeparation.INFINITE) -> AnsatzResult:
    ell = parse_ell(ell)
    if ell is LayerSeparation.INFINITE:
        energy = stripe_energy_gamma(a, m)
    else:
        energy = stripe_energy_modified(a, m, ell)
    return AnsatzResult(AnsatzShape.STRIPE, {"a": a, "m": m}, ell, energy, m)


def disk_expansion_coefficient(a_values, ell) -> Optional[float]:
    """
    Fit c in f_disk(a) - 2a[log(2/l) - 2] = c a^3 log(1/a) + d a^3.

    Takes the two smallest a values; the small-a limit of c is 3 l^2 / 8.
    """
    ell = _finite_ell(ell)
    points = sorted(float(a) for a in a_values)[:2]
    if len(points) < 2:
        return None
    scaled = []
    for a in points:
        residual = f_disk(a, ell) - 2.0 * a * (math.log(2.0 / ell) - 2.0)
        scaled.append((residual / a ** 3, math.log(1.0 / a)))
    (r1, l1), (r2, l2) = scaled
    return (r1 - r2) / (l1 - l2)

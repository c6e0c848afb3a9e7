"""
Complete elliptic integrals in the parameter convention.

K(k) = int_0^{pi/2} (1 - k sin^2 t)^(-1/2) dt and
E(k) = int_0^{pi/2} (1 - k sin^2 t)^(1/2) dt, where k multiplies sin^2 t.
Both are evaluated by the arithmetic-geometric mean. The ``_m1`` variants
take the complementary parameter p = 1 - k, which keeps full relative
accuracy of K near its logarithmic singularity at k = 1.
"""

import logging
import math

import numpy as np

from dipolar.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

_MAX_ITERATIONS = 64
_TOLERANCE = 1e-15


def _agm(p: np.ndarray):
    """Return (AGM(1, sqrt(p)), sum_n 2^(n-1) c_n^2) for the complementary parameter p."""
    a = np.ones_like(p)
    b = np.sqrt(p)
    c_sum = 0.5 * (1.0 - p)
    weight = 0.5
    for _ in range(_MAX_ITERATIONS):
        c = 0.5 * (a - b)
        weight *= 2.0
        c_sum = c_sum + weight * c * c
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.all(np.abs(c) <= _TOLERANCE * a):
            break
    else:
        logger.warning("AGM iteration did not reach tolerance")
    return a, c_sum


def _check(values, name: str, allow_zero_complement: bool) -> np.ndarray:
    """Validate a parameter k (name 'k') or complement p (name 'p') and return p."""
    values = np.asarray(values, dtype=float)
    p = 1.0 - values if name == "k" else values
    limit_ok = p >= 0.0 if allow_zero_complement else p > 0.0
    if not np.all(limit_ok & (p <= 1.0) & np.isfinite(p)):
        if name == "k":
            bound = "[0, 1]" if allow_zero_complement else "[0, 1)"
        else:
            bound = "[0, 1]" if allow_zero_complement else "(0, 1]"
        raise ValidationError(f"elliptic parameter {name} must lie in {bound}, got {values}")
    return p


def _complete_K(p: np.ndarray, like):
    agm, _ = _agm(p)
    result = 0.5 * math.pi / agm
    return float(result) if np.ndim(like) == 0 else result


def _complete_E(p: np.ndarray, like):
    at_one = p == 0.0
    agm, c_sum = _agm(np.where(at_one, 1.0, p))
    result = np.where(at_one, 1.0, 0.5 * math.pi / agm * (1.0 - c_sum))
    return float(result) if np.ndim(like) == 0 else result


def elliptic_K(k):
    """Complete elliptic integral of the first kind; K(1) diverges and is rejected."""
    return _complete_K(_check(k, "k", allow_zero_complement=False), k)


def elliptic_E(k):
    """Complete elliptic integral of the second kind, with E(1) = 1."""
    return _complete_E(_check(k, "k", allow_zero_complement=True), k)


def elliptic_K_m1(p):
    """K(1 - p) for p in (0, 1]."""
    return _complete_K(_check(p, "p", allow_zero_complement=False), p)


def elliptic_E_m1(p):
    """E(1 - p) for p in [0, 1]."""
    return _complete_E(_check(p, "p", allow_zero_complement=True), p)

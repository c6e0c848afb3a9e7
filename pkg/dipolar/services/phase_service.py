"""
Disk versus stripe comparison in the modified critical limit.

For ell above 2/e^2 the disk energy per mass has an interior minimum a(ell);
stripes of the same width parameter win when f_stripe(a(ell)) is smaller.
"""

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from dipolar.evaluators.gamma_evaluator import gamma_limit_energy_modified
from dipolar.geometry.curves import make_disk
from dipolar.geometry.shapes import FAR_SEPARATED, Component, ShapeConfig
from dipolar.services.ansatz_service import f_disk, f_stripe, stripe_energy_modified
from dipolar.utils.exceptions import ValidationError
from dipolar.utils.validators import validate_grid, validate_positive

logger = logging.getLogger(__name__)

CRITICAL_ELL = 2.0 / math.e ** 2
A_LO = 1e-8
WINNER_GUARD = 1e-10
MASS_CAP = 1e9
MASS_FLOOR = 1e-6
_GRID_POINTS = 241
_A_TOL = 1e-12


class Winner(str, enum.Enum):
    DISK = "DISK"
    STRIPE = "STRIPE"
    DEGENERATE = "DEGENERATE"


@dataclass
class PhasePoint:
    """Outcome of the disk/stripe comparison at one layer separation."""

    ell: float
    a_opt: float
    f_disk_min: float
    f_stripe_at_a_opt: float
    winner: Winner
    m_est: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ell": self.ell,
            "a_opt": self.a_opt,
            "f_disk_min": self.f_disk_min,
            "f_stripe": self.f_stripe_at_a_opt,
            "winner": self.winner.value,
            "M_est": self.m_est,
        }


def _upper_scale(ell: float) -> float:
    a_hi = 1.0
    while f_disk(2.0 * a_hi, ell) <= f_disk(a_hi, ell):
        a_hi *= 2.0
        if a_hi > 1e12:
            raise ValidationError(f"no increasing branch of f_disk found for ell={ell}")
    return 2.0 * a_hi


def _minimize(ell: float) -> float:
    a_hi = _upper_scale(ell)
    grid = np.geomspace(A_LO, a_hi, _GRID_POINTS)
    values = np.array([f_disk(a, ell) for a in grid])
    best = int(np.argmin(values))
    if best == 0:
        return A_LO
    if best == grid.size - 1:
        raise ValidationError(f"minimum of f_disk at the upper search bound for ell={ell}")
    bracket = (grid[best - 1], grid[best], grid[best + 1])
    result = minimize_scalar(lambda a: f_disk(a, ell), bracket=bracket, method="golden",
                             tol=_A_TOL)
    return float(result.x)


def find_optimal_disk_scale(ell: float) -> Optional[float]:
    """
    Minimizer a(ell) of f_disk, by golden-section search.

    Returns:
        a_opt, or None (degenerate) when ell <= 2/e^2 or the minimum sits at the
        lower search bound
    """
    ell = validate_positive(ell, "ell")
    if ell <= CRITICAL_ELL:
        return None
    a_opt = _minimize(ell)
    return None if a_opt <= A_LO else a_opt


def compare_phases(ell: float) -> PhasePoint:
    """Disk optimum at ell and the stripe energy per mass at the same a."""
    ell = validate_positive(ell, "ell")
    a_opt = find_optimal_disk_scale(ell)
    if a_opt is None:
        return PhasePoint(ell, A_LO, f_disk(A_LO, ell), f_stripe(A_LO, ell), Winner.DEGENERATE)
    disk_min = f_disk(a_opt, ell)
    stripe = f_stripe(a_opt, ell)
    winner = Winner.STRIPE if stripe < disk_min - WINNER_GUARD else Winner.DISK
    logger.debug(f"ell={ell:.6g}: a_opt={a_opt:.9g}, f_disk={disk_min:.9g}, f_stripe={stripe:.9g}")
    return PhasePoint(ell, a_opt, disk_min, stripe, winner)


def mass_threshold(ell: float, point: Optional[PhasePoint] = None, rtol: float = 1e-6) -> Optional[float]:
    """
    Smallest mass at which the stripe S_{a_opt,m} beats every disk assembly per mass.

    Returns:
        The mass, MASS_FLOOR when stripes already win there, or None when
        the search cap MASS_CAP is exceeded

    Raises:
        ValidationError: If stripes do not win at this ell
    """
    point = point or compare_phases(ell)
    if point.winner is not Winner.STRIPE:
        raise ValidationError(f"mass threshold needs a STRIPE phase point, got {point.winner.value}")
    a, target = point.a_opt, point.f_disk_min

    def wins(m: float) -> bool:
        return stripe_energy_modified(a, m, point.ell) / m < target

    m = 1.0
    if wins(m):
        while wins(m):
            if m <= MASS_FLOOR:
                logger.warning(f"Stripes win down to the mass floor {MASS_FLOOR:.0e} for ell={point.ell}")
                return MASS_FLOOR
            m *= 0.5
        lo, hi = m, 2.0 * m
    else:
        while not wins(m):
            m *= 2.0
            if m > MASS_CAP:
                logger.warning(f"Mass threshold above {MASS_CAP:.0e} for ell={point.ell}")
                return None
        lo, hi = 0.5 * m, m
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if wins(mid):
            hi = mid
        else:
            lo = mid
    return hi


def crossover_scan(l_grid: Sequence[float], workers: int = 1,
                   with_mass: bool = False) -> List[PhasePoint]:
    """
    Phase point for every ell, in input order.

    Args:
        l_grid: Layer separations (> 0)
        workers: Threads over grid rows
        with_mass: Also estimate the mass threshold for STRIPE rows
    """
    grid = validate_grid(l_grid, "ell")

    def row(ell: float) -> PhasePoint:
        point = compare_phases(ell)
        if with_mass and point.winner is Winner.STRIPE:
            point.m_est = mass_threshold(ell, point)
        return point

    if workers <= 1 or len(grid) <= 1:
        points = [row(ell) for ell in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            points = list(executor.map(row, grid))
    logger.info(f"Scanned {len(points)} layer separations; "
                f"{sum(p.winner is Winner.STRIPE for p in points)} STRIPE rows")
    return points


def phase_curves(ell: float, a_values: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """f_disk and f_stripe on a grid of a, for plotting."""
    a_values = validate_grid(a_values, "a")
    disk = np.array([f_disk(a, ell) for a in a_values])
    stripe = np.array([f_stripe(a, ell) for a in a_values])
    return disk, stripe


def disk_assembly(ell: float, count: int, a_opt: Optional[float] = None) -> ShapeConfig:
    """Far-separated assembly of ``count`` equal disks of radius 1/a_opt."""
    if count < 1:
        raise ValidationError("an assembly needs at least one disk")
    a_opt = a_opt if a_opt is not None else find_optimal_disk_scale(ell)
    if a_opt is None:
        raise ValidationError(f"no optimal disk scale for ell={ell}")
    disk = make_disk(1.0 / a_opt)
    return ShapeConfig(tuple(Component(disk, FAR_SEPARATED) for _ in range(count)))


def disk_assembly_check(ell: float, count: int, n: Optional[int] = None,
                        workers: int = 1) -> Tuple[float, float]:
    """
    Modified limit energy of an optimal disk assembly against m f_disk_min.

    Returns:
        (assembly energy, mass * f_disk_min)
    """
    point = compare_phases(ell)
    if point.winner is Winner.DEGENERATE:
        raise ValidationError(f"ell={ell} is in the degenerate regime")
    config = disk_assembly(ell, count, point.a_opt)
    energy = gamma_limit_energy_modified(config, ell, n, workers).total
    return energy, config.mass * point.f_disk_min

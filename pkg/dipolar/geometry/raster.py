"""Boolean occupancy grids for volume-form energies."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from matplotlib.path import Path as MplPath

from dipolar.geometry.shapes import ShapeConfig
from dipolar.utils.exceptions import ValidationError
from dipolar.utils.validators import validate_positive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RasterSet:
    """
    Occupancy mask on a square grid.

    ``mask[i, j]`` covers the cell centered at
    ``(origin[0] + j h, origin[1] + i h)``.
    """

    h: float
    origin: Tuple[float, float]
    mask: np.ndarray

    def __post_init__(self):
        validate_positive(self.h, "h")
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2:
            raise ValidationError("raster mask must be two-dimensional")
        object.__setattr__(self, "mask", mask)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def mass(self) -> float:
        return self.h * self.h * self.count

    @property
    def empty(self) -> bool:
        return self.count == 0

    def centers(self) -> np.ndarray:
        """Centers of all cells as an (ny, nx, 2) array."""
        ny, nx = self.mask.shape
        xs = self.origin[0] + self.h * np.arange(nx)
        ys = self.origin[1] + self.h * np.arange(ny)
        gx, gy = np.meshgrid(xs, ys)
        return np.stack([gx, gy], axis=-1)

    def occupied_points(self) -> np.ndarray:
        return self.centers()[self.mask]

    def disk_mask(self, radius: float, center: Tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
        """Cells of this grid whose centers lie strictly inside a disk."""
        c = self.centers()
        return (c[..., 0] - center[0]) ** 2 + (c[..., 1] - center[1]) ** 2 < radius * radius


def _grid_for_bounds(lo: np.ndarray, hi: np.ndarray, h: float) -> Tuple[Tuple[float, float], int, int]:
    # align cell centers with multiples of h so that rasters of one h share a lattice
    x0 = math.floor(lo[0] / h) * h - h
    y0 = math.floor(lo[1] / h) * h - h
    nx = int(math.ceil((hi[0] - x0) / h)) + 2
    ny = int(math.ceil((hi[1] - y0) / h)) + 2
    return (x0, y0), nx, ny


def rasterize(config: ShapeConfig, h: float,
              bounds: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None) -> RasterSet:
    """
    Rasterize a shape: a cell is occupied iff its center is inside a component.

    Args:
        config: Shape with finitely placed components
        h: Grid spacing
        bounds: Optional ((xmin, ymin), (xmax, ymax)) window; defaults to the bounding box

    Returns:
        RasterSet on a grid aligned with multiples of h

    Raises:
        ValidationError: If a component is FAR_SEPARATED or h <= 0
    """
    h = validate_positive(h, "h")
    if not config.all_finite:
        raise ValidationError("far-separated components cannot share a raster grid")
    if config.empty:
        return RasterSet(h, (0.0, 0.0), np.zeros((0, 0), dtype=bool))

    outlines = [c.placed_curve.polyline(max(8 * c.curve.n_modes, 2048)) for c in config.components]
    if bounds is None:
        stacked = np.vstack(outlines)
        lo, hi = stacked.min(axis=0), stacked.max(axis=0)
    else:
        lo, hi = np.asarray(bounds[0], dtype=float), np.asarray(bounds[1], dtype=float)
    origin, nx, ny = _grid_for_bounds(lo, hi, h)

    raster = RasterSet(h, origin, np.zeros((ny, nx), dtype=bool))
    points = raster.centers().reshape(-1, 2)
    mask = np.zeros(points.shape[0], dtype=bool)
    for outline in outlines:
        mask |= MplPath(outline).contains_points(points)
    result = RasterSet(h, origin, mask.reshape(ny, nx))
    logger.debug(f"Rasterized {len(outlines)} components: {nx}x{ny} cells, mass {result.mass:.6g}")
    return result

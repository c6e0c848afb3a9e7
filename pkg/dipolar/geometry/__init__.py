"""Shape representations: Fourier curves, placed configurations, rasters."""

from dipolar.geometry.curves import (
    JordanCurve,
    SampledCurve,
    sample_arclength,
    sample_parameter,
    curve_perimeter,
    make_disk,
    make_ellipse,
    make_stripe,
    make_random_star,
    polyline_self_intersects,
    polylines_intersect,
    validate_curve,
)
from dipolar.geometry.shapes import (
    Component,
    Placement,
    FAR_SEPARATED,
    ShapeConfig,
    enclosed_area,
    parse_shape_spec,
)
from dipolar.geometry.raster import RasterSet, rasterize

__all__ = [
    "JordanCurve",
    "SampledCurve",
    "sample_arclength",
    "sample_parameter",
    "curve_perimeter",
    "make_disk",
    "make_ellipse",
    "make_stripe",
    "make_random_star",
    "polyline_self_intersects",
    "polylines_intersect",
    "validate_curve",
    "Component",
    "Placement",
    "FAR_SEPARATED",
    "ShapeConfig",
    "enclosed_area",
    "parse_shape_spec",
    "RasterSet",
    "rasterize",
]

"""
Shape configurations: Jordan curves grouped into placed components.

A component is either translated to a finite position or tagged
``Placement.FAR``; cross interactions with far components are omitted.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Tuple, Union

from matplotlib.path import Path as MplPath

from dipolar.geometry.curves import (
    JordanCurve,
    make_disk,
    make_ellipse,
    make_stripe,
    polylines_intersect,
    validate_curve,
)
from dipolar.utils.exceptions import GeometryError, ValidationError

logger = logging.getLogger(__name__)


class Placement:
    """Namespace for the far-separated placement tag."""

    FAR = "far"


FAR_SEPARATED = Placement.FAR

Offset = Union[Tuple[float, float], str]


@dataclass(frozen=True)
class Component:
    curve: JordanCurve
    placement: Offset = (0.0, 0.0)

    def __post_init__(self):
        if self.placement != FAR_SEPARATED:
            try:
                x, y = (float(v) for v in self.placement)
            except (TypeError, ValueError):
                raise ValidationError(f"placement must be [x, y] or 'far', got {self.placement!r}")
            object.__setattr__(self, "placement", (x, y))

    @property
    def far(self) -> bool:
        return self.placement == FAR_SEPARATED

    @property
    def placed_curve(self) -> JordanCurve:
        """The curve in its own frame (far) or translated to its position."""
        if self.far:
            return self.curve
        return self.curve.translate(*self.placement)

    @property
    def area(self) -> float:
        return self.curve.signed_area


@dataclass(frozen=True)
class ShapeConfig:
    """Finite union of Jordan domains with total mass ``mass``."""

    components: Tuple[Component, ...]
    mass: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        total = float(sum(c.area for c in self.components))
        if self.mass and abs(self.mass - total) > 1e-6 * max(1.0, total):
            raise ValidationError(f"mass {self.mass} does not match component areas {total}")
        object.__setattr__(self, "mass", total)

    @property
    def empty(self) -> bool:
        return not self.components

    @property
    def all_finite(self) -> bool:
        return all(not c.far for c in self.components)

    @property
    def smooth(self) -> bool:
        return all(c.curve.smooth for c in self.components)

    @property
    def single_curve(self) -> JordanCurve:
        if len(self.components) != 1:
            raise ValidationError("a single-component shape is required")
        return self.components[0].placed_curve

    def validate(self) -> "ShapeConfig":
        """
        Check orientation and simplicity of every curve and pairwise
        disjointness of finitely placed components.

        Raises:
            GeometryError: If any check fails
        """
        for component in self.components:
            validate_curve(component.curve)
        finite = [c.placed_curve.polyline() for c in self.components if not c.far]
        for i in range(len(finite)):
            for j in range(i + 1, len(finite)):
                if polylines_intersect(finite[i], finite[j]):
                    raise GeometryError(f"components {i} and {j} intersect")
                inside_ij = MplPath(finite[i]).contains_point(tuple(finite[j][0]))
                inside_ji = MplPath(finite[j]).contains_point(tuple(finite[i][0]))
                if inside_ij or inside_ji:
                    raise GeometryError(f"components {i} and {j} are nested")
        return self

    def translate(self, dx: float, dy: float) -> "ShapeConfig":
        moved = [
            c if c.far else Component(c.curve, (c.placement[0] + dx, c.placement[1] + dy))
            for c in self.components
        ]
        return ShapeConfig(tuple(moved))

    def dilate(self, alpha: float) -> "ShapeConfig":
        """Scale every component (and every finite offset) by alpha about the origin."""
        scaled = [
            Component(c.curve.dilate(alpha),
                      c.placement if c.far else (alpha * c.placement[0], alpha * c.placement[1]))
            for c in self.components
        ]
        return ShapeConfig(tuple(scaled))

    def to_dict(self) -> Dict[str, Any]:
        components = []
        for c in self.components:
            entry = c.curve.to_dict()
            entry["placement"] = FAR_SEPARATED if c.far else list(c.placement)
            if not c.curve.smooth:
                entry["smooth"] = False
            components.append(entry)
        return {"components": components}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ShapeConfig":
        if "components" not in data:
            raise ValidationError("shape document requires a 'components' list")
        components = []
        for entry in data["components"]:
            placement = entry.get("placement", [0.0, 0.0])
            if isinstance(placement, str) and placement.lower() == FAR_SEPARATED:
                placement = FAR_SEPARATED
            components.append(Component(JordanCurve.from_dict(entry), placement))
        return cls(tuple(components))

    @classmethod
    def from_curves(cls, *curves: JordanCurve, far: bool = False) -> "ShapeConfig":
        placement = FAR_SEPARATED if far else (0.0, 0.0)
        return cls(tuple(Component(curve, placement) for curve in curves))

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ShapeConfig":
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"shape file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(f"shape file {path} is not valid JSON: {e}")
        return cls.from_dict(data)


def enclosed_area(shape: Union[JordanCurve, ShapeConfig]) -> float:
    """
    Green's-theorem area of a curve or the total area of a configuration.

    Raises:
        GeometryError: If a curve has non-positive signed area (orientation violation)
    """
    curves = [shape] if isinstance(shape, JordanCurve) else [c.curve for c in shape.components]
    total = 0.0
    for curve in curves:
        area = curve.signed_area
        if area <= 0:
            raise GeometryError(f"negative signed area {area:.6g}: curve is clockwise")
        total += area
    return total


def parse_shape_spec(spec: str, n_modes: int = 256) -> ShapeConfig:
    """
    Build a shape from an inline spec or a JSON file path.

    Supported forms: ``disk:r``, ``ellipse:a,b``, ``ellipse:aspect`` (area pi),
    ``stripe:a,m`` and ``stripe:a,m,rho``.

    Raises:
        ValidationError: If the spec is malformed
    """
    spec = (spec or "").strip()
    if not spec:
        raise ValidationError("empty shape spec")
    kind, _, rest = spec.partition(":")
    kind = kind.lower()
    if kind not in ("disk", "ellipse", "stripe"):
        return ShapeConfig.load(spec)
    try:
        values = [float(v) for v in rest.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"invalid numbers in shape spec '{spec}'")

    if kind == "disk" and len(values) == 1:
        curve = make_disk(values[0])
    elif kind == "ellipse" and len(values) == 2:
        curve = make_ellipse(values[0], values[1])
    elif kind == "ellipse" and len(values) == 1:
        aspect = values[0]
        if aspect <= 0:
            raise ValidationError("ellipse aspect must be positive")
        curve = make_ellipse(math.sqrt(aspect), 1.0 / math.sqrt(aspect))
    elif kind == "stripe" and len(values) in (2, 3):
        rho = values[2] if len(values) == 3 else 0.0
        curve = make_stripe(values[0], values[1], rho, n_modes=n_modes)
    else:
        raise ValidationError(f"cannot parse shape spec '{spec}'")
    logger.debug(f"Parsed shape spec '{spec}' (area {curve.signed_area:.6g})")
    return ShapeConfig.from_curves(curve)

"""
Fourier-parametrized closed curves and their arclength samplings.

A JordanCurve stores finite cosine/sine coefficient lists for x(t) and y(t),
t in [0, 2 pi). Derivatives of any order are exact. A SampledCurve carries the
node positions together with unit tangents, outward unit normals, curvature
and arclength weights; every boundary quadrature in the package runs on it.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from dipolar.utils.exceptions import GeometryError, ValidationError
from dipolar.utils.validators import validate_node_count, validate_positive

logger = logging.getLogger(__name__)

_NEWTON_STEPS = 4
_MIN_PERIMETER = 1e-12
_CHUNK = 256


def _as_coefficients(values: Sequence[float], size: int) -> np.ndarray:
    out = np.zeros(size)
    arr = np.asarray(values, dtype=float).ravel()
    out[: arr.size] = arr
    return out


@dataclass(frozen=True)
class JordanCurve:
    """
    Closed curve x(t) = sum_k cos_x[k] cos(kt) + sin_x[k] sin(kt), same for y.

    ``smooth`` is False for curves that approximate a shape with corners
    (sharp rectangles); such curves are rejected by the curve-form evaluators.
    """

    cos_x: np.ndarray
    sin_x: np.ndarray
    cos_y: np.ndarray
    sin_y: np.ndarray
    smooth: bool = True

    def __post_init__(self):
        size = max(len(self.cos_x), len(self.sin_x), len(self.cos_y), len(self.sin_y), 2)
        for name in ("cos_x", "sin_x", "cos_y", "sin_y"):
            coeffs = _as_coefficients(getattr(self, name), size)
            if name.startswith("sin"):
                coeffs[0] = 0.0
            if not np.all(np.isfinite(coeffs)):
                raise GeometryError(f"{name} contains non-finite coefficients")
            coeffs.setflags(write=False)
            object.__setattr__(self, name, coeffs)

    # -- spectral helpers -------------------------------------------------
    @property
    def n_modes(self) -> int:
        return len(self.cos_x) - 1

    @property
    def _zx(self) -> np.ndarray:
        z = self.cos_x - 1j * self.sin_x
        z[0] = self.cos_x[0]
        return z

    @property
    def _zy(self) -> np.ndarray:
        z = self.cos_y - 1j * self.sin_y
        z[0] = self.cos_y[0]
        return z

    def evaluate(self, t, derivative: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """
        Evaluate the curve or one of its derivatives at parameters t.

        Args:
            t: Parameter values (any shape)
            derivative: Derivative order (0 for positions)

        Returns:
            Tuple (x, y) of arrays with the shape of t
        """
        t = np.asarray(t, dtype=float)
        k = np.arange(self.n_modes + 1)
        factor = (1j * k) ** derivative
        flat = t.ravel()
        x = np.empty(flat.size)
        y = np.empty(flat.size)
        for start in range(0, flat.size, _CHUNK * 8):
            block = flat[start : start + _CHUNK * 8]
            waves = np.exp(1j * np.outer(block, k))
            x[start : start + block.size] = (waves @ (self._zx * factor)).real
            y[start : start + block.size] = (waves @ (self._zy * factor)).real
        return x.reshape(t.shape), y.reshape(t.shape)

    def evaluate_uniform(self, m: int, derivative: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Evaluate on the uniform grid t_j = 2 pi j / m by inverse FFT."""
        if m < 2 * self.n_modes + 2:
            t = 2.0 * math.pi * np.arange(m) / m
            return self.evaluate(t, derivative)
        k = np.arange(self.n_modes + 1)
        factor = (1j * k) ** derivative
        out = []
        for z in (self._zx, self._zy):
            spectrum = np.zeros(m // 2 + 1, dtype=complex)
            spectrum[: k.size] = 0.5 * m * z * factor
            spectrum[0] *= 2.0
            out.append(np.fft.irfft(spectrum, n=m))
        return out[0], out[1]

    # -- geometry ----------------------------------------------------------
    @property
    def signed_area(self) -> float:
        """Exact Green's-theorem area pi * sum_k k (a_k d_k - b_k c_k)."""
        k = np.arange(self.n_modes + 1)
        return float(math.pi * np.sum(k * (self.cos_x * self.sin_y - self.sin_x * self.cos_y)))

    def centroid(self) -> Tuple[float, float]:
        m = max(4 * self.n_modes + 8, 64)
        x, y = self.evaluate_uniform(m)
        dx, dy = self.evaluate_uniform(m, 1)
        area = self.signed_area
        if area == 0:
            raise GeometryError("centroid of a curve with zero area")
        scale = 2.0 * math.pi / m
        cx = 0.5 * np.sum(x * x * dy) * scale / area
        cy = -0.5 * np.sum(y * y * dx) * scale / area
        return float(cx), float(cy)

    def dilate(self, alpha: float, center: Optional[Tuple[float, float]] = None) -> "JordanCurve":
        """Scale the curve by alpha about ``center`` (origin by default)."""
        alpha = validate_positive(alpha, "alpha")
        cx, cy = center if center is not None else (0.0, 0.0)
        cos_x = alpha * self.cos_x
        cos_y = alpha * self.cos_y
        cos_x[0] = cx + alpha * (self.cos_x[0] - cx)
        cos_y[0] = cy + alpha * (self.cos_y[0] - cy)
        return JordanCurve(cos_x, alpha * self.sin_x, cos_y, alpha * self.sin_y, self.smooth)

    def translate(self, dx: float, dy: float) -> "JordanCurve":
        cos_x = self.cos_x.copy()
        cos_y = self.cos_y.copy()
        cos_x[0] += dx
        cos_y[0] += dy
        return JordanCurve(cos_x, self.sin_x, cos_y, self.sin_y, self.smooth)

    def polyline(self, m: Optional[int] = None) -> np.ndarray:
        """Positions on a uniform parameter grid as an (m, 2) array."""
        m = m or max(8 * self.n_modes, 256)
        x, y = self.evaluate_uniform(m)
        return np.column_stack([x, y])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cos_x": self.cos_x.tolist(),
            "sin_x": self.sin_x.tolist(),
            "cos_y": self.cos_y.tolist(),
            "sin_y": self.sin_y.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], smooth: bool = True) -> "JordanCurve":
        missing = {"cos_x", "sin_x", "cos_y", "sin_y"} - set(data)
        if missing:
            raise ValidationError(f"curve is missing coefficient lists: {sorted(missing)}")
        return cls(data["cos_x"], data["sin_x"], data["cos_y"], data["sin_y"],
                   smooth=bool(data.get("smooth", smooth)))

    @classmethod
    def from_samples(cls, points: np.ndarray, n_modes: Optional[int] = None,
                     smooth: bool = True, filter_order: int = 0) -> "JordanCurve":
        """
        Fit a curve to positions sampled at uniform parameter values.

        Args:
            points: (m, 2) array of positions at t_j = 2 pi j / m
            n_modes: Number of retained modes (at most m/2 - 1)
            smooth: Smoothness flag stored on the result
            filter_order: Order p of the exponential filter exp(-36 (k/N)^p); 0 disables it

        Returns:
            The fitted JordanCurve
        """
        points = np.asarray(points, dtype=float)
        m = points.shape[0]
        if m < 8:
            raise GeometryError("at least 8 samples are needed to fit a curve")
        limit = m // 2 - 1
        n_modes = limit if n_modes is None else min(int(n_modes), limit)
        k = np.arange(n_modes + 1)
        weights = np.ones(n_modes + 1)
        if filter_order:
            weights = np.exp(-36.0 * (k / n_modes) ** filter_order)
        coeffs = []
        for column in (points[:, 0], points[:, 1]):
            spectrum = np.fft.rfft(column)[: n_modes + 1] / m
            z = 2.0 * spectrum
            z[0] = spectrum[0]
            z = z * weights
            coeffs.append((z.real, -z.imag))
        (cx, sx), (cy, sy) = coeffs
        sx[0] = 0.0
        sy[0] = 0.0
        return cls(cx, sx, cy, sy, smooth=smooth)


@dataclass(frozen=True)
class SampledCurve:
    """
    Nodes of a closed curve with exact differential geometry.

    ``normals`` are outward unit normals. ``ds`` are the arclength weights of
    the nodes (all equal to P/n after an arclength sampling) and ``arclength``
    the arclength position of each node measured from node 0.
    """

    points: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    ds: np.ndarray
    arclength: np.ndarray
    perimeter: float
    smooth: bool = True
    curve: Optional[JordanCurve] = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def spacing(self) -> float:
        return float(np.max(self.ds))

    @property
    def uniform(self) -> bool:
        return bool(np.ptp(self.ds) <= 1e-9 * self.perimeter)

    def translated(self, dx: float, dy: float) -> "SampledCurve":
        shift = np.array([dx, dy])
        curve = self.curve.translate(dx, dy) if self.curve is not None else None
        return SampledCurve(self.points + shift, self.tangents, self.normals, self.curvature,
                            self.ds, self.arclength, self.perimeter, self.smooth, curve)

    def enclosed_area(self) -> float:
        """Shoelace area of the node polygon."""
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _node_geometry(curve: JordanCurve, t: np.ndarray):
    x, y = curve.evaluate(t)
    dx, dy = curve.evaluate(t, 1)
    ddx, ddy = curve.evaluate(t, 2)
    speed = np.hypot(dx, dy)
    floor = 1e-14 * max(1.0, float(np.max(speed)))
    if np.any(speed <= floor):
        if curve.smooth:
            raise GeometryError("curve has a stationary point; cannot define a tangent")
        # corner nodes of a sharp outline carry no tangent information
        speed = np.maximum(speed, floor)
    tangents = np.column_stack([dx, dy]) / speed[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    curvature = (dx * ddy - dy * ddx) / speed ** 3
    return np.column_stack([x, y]), tangents, normals, curvature, speed


def _arclength_series(curve: JordanCurve, n: int):
    """Spectral representation of the speed; returns (perimeter, fine grid data)."""
    m = 1 << int(math.ceil(math.log2(max(16 * curve.n_modes + 16, 4 * n, 1024))))
    dx, dy = curve.evaluate_uniform(m, 1)
    speed = np.hypot(dx, dy)
    spectrum = np.fft.rfft(speed) / m
    perimeter = 2.0 * math.pi * spectrum[0].real
    return m, speed, spectrum, perimeter


def _cumulative(t: np.ndarray, spectrum: np.ndarray) -> np.ndarray:
    """s(t) = sigma_0 t + sum_k 2 Re(sigma_k (e^{ikt} - 1)/(ik))."""
    tail = spectrum[1:-1]
    significant = np.nonzero(np.abs(tail) > 1e-15 * abs(spectrum[0]))[0]
    tail = tail[: significant[-1] + 1] if significant.size else tail[:0]
    k = np.arange(1, tail.size + 1)
    coeffs = 2.0 * tail / (1j * k)
    s = spectrum[0].real * t
    for start in range(0, t.size, _CHUNK):
        block = t[start : start + _CHUNK]
        waves = np.exp(1j * np.outer(block, k)) - 1.0
        s[start : start + block.size] += (waves @ coeffs).real
    return s


def sample_arclength(curve: JordanCurve, n: int) -> SampledCurve:
    """
    Sample a curve at n nodes of equal arclength spacing.

    Args:
        curve: The curve to sample
        n: Node count (>= 16)

    Returns:
        SampledCurve with uniform weights P/n

    Raises:
        GeometryError: If the curve is degenerate (perimeter < 1e-12)
    """
    n = validate_node_count(n)
    m, speed, spectrum, perimeter = _arclength_series(curve, n)
    if not perimeter > _MIN_PERIMETER:
        raise GeometryError(f"degenerate curve (perimeter {perimeter:.3e})")

    fine_t = 2.0 * math.pi * np.arange(m + 1) / m
    fine_s = np.concatenate([[0.0], np.cumsum(0.5 * (speed + np.roll(speed, -1)))]) * (
        2.0 * math.pi / m
    )
    fine_s *= perimeter / fine_s[-1]
    targets = perimeter * np.arange(n) / n
    t = np.interp(targets, fine_s, fine_t)
    for _ in range(_NEWTON_STEPS):
        dx, dy = curve.evaluate(t, 1)
        rate = np.maximum(np.hypot(dx, dy), 1e-3 * perimeter / (2.0 * math.pi))
        t = t - (_cumulative(t, spectrum) - targets) / rate

    points, tangents, normals, curvature, _ = _node_geometry(curve, t)
    ds = np.full(n, perimeter / n)
    logger.debug(f"Sampled curve: n={n}, P={perimeter:.12f}, modes={curve.n_modes}")
    return SampledCurve(points, tangents, normals, curvature, ds, targets, perimeter,
                        curve.smooth, curve)


def sample_parameter(curve: JordanCurve, n: int) -> SampledCurve:
    """
    Sample a curve at uniform parameter values t_j = 2 pi j / n.

    The arclength weights are |gamma'(t_j)| 2 pi / n, so trapezoid sums in the
    parameter remain spectrally accurate for non-arclength parametrizations.
    """
    n = validate_node_count(n)
    m, _, spectrum, perimeter = _arclength_series(curve, n)
    if not perimeter > _MIN_PERIMETER:
        raise GeometryError(f"degenerate curve (perimeter {perimeter:.3e})")
    t = 2.0 * math.pi * np.arange(n) / n
    points, tangents, normals, curvature, speed = _node_geometry(curve, t)
    ds = speed * (2.0 * math.pi / n)
    arclength = _cumulative(t, spectrum)
    return SampledCurve(points, tangents, normals, curvature, ds, arclength,
                        float(np.sum(ds)), curve.smooth, curve)


def curve_perimeter(curve: JordanCurve) -> float:
    """Spectrally accurate length of a curve (no node geometry needed)."""
    _, _, _, perimeter = _arclength_series(curve, 16)
    return float(perimeter)


# -- constructors -----------------------------------------------------------

def make_disk(r: float, center: Tuple[float, float] = (0.0, 0.0)) -> JordanCurve:
    r = validate_positive(r, "r")
    return JordanCurve([center[0], r], [0.0, 0.0], [center[1], 0.0], [0.0, r])


def make_ellipse(a: float, b: float) -> JordanCurve:
    """Ellipse with semi-axes a (along x) and b (along y)."""
    a = validate_positive(a, "a")
    b = validate_positive(b, "b")
    return JordanCurve([0.0, a], [0.0, 0.0], [0.0, 0.0], [0.0, b])


def make_random_star(rng: np.random.Generator, modes: int = 4, amplitude: float = 0.25,
                     area: Optional[float] = math.pi) -> JordanCurve:
    """
    Star-shaped curve r(t) = 1 + sum_k (a_k cos kt + b_k sin kt), band-limited to ``modes``.

    Coefficients decay like 1/k and are scaled so that sum |a_k| + |b_k| <= amplitude < 1,
    which keeps r positive and the curve simple.
    """
    if not 0.0 < amplitude < 1.0:
        raise ValidationError("amplitude must lie in (0, 1)")
    k = np.arange(1, modes + 1)
    coeffs = rng.uniform(-1.0, 1.0, size=(2, modes)) / k
    coeffs *= amplitude / np.sum(np.abs(coeffs))
    t = 2.0 * math.pi * np.arange(8 * modes + 16) / (8 * modes + 16)
    radius = 1.0 + coeffs[0] @ np.cos(np.outer(k, t)) + coeffs[1] @ np.sin(np.outer(k, t))
    points = np.column_stack([radius * np.cos(t), radius * np.sin(t)])
    curve = JordanCurve.from_samples(points, n_modes=modes + 1)
    if area is not None:
        curve = curve.dilate(math.sqrt(area / curve.signed_area))
    return curve


def _corner_profile(u: np.ndarray) -> np.ndarray:
    """Monotone map of [0, 1] onto itself whose first four derivatives vanish at the ends."""
    return (u - 2.0 / (3.0 * math.pi) * np.sin(2.0 * math.pi * u)
            + 1.0 / (12.0 * math.pi) * np.sin(4.0 * math.pi * u))


def _rectangle_points(lx: float, ly: float, m: int) -> np.ndarray:
    corners = np.array([
        [lx / 2, -ly / 2], [lx / 2, ly / 2], [-lx / 2, ly / 2], [-lx / 2, -ly / 2],
    ])
    tau = 4.0 * np.arange(m) / m
    side = np.minimum(tau.astype(int), 3)
    w = _corner_profile(tau - side)[:, None]
    start = corners[side]
    end = corners[(side + 1) % 4]
    return start + w * (end - start)


def _rounded_rectangle_points(lx: float, ly: float, rho: float, s: np.ndarray) -> np.ndarray:
    """Positions at arclength s along the rounded rectangle, starting at (lx/2, 0)."""
    hx, hy = lx / 2 - rho, ly / 2 - rho
    arc = 0.5 * math.pi * rho
    # (kind, start point or arc center, direction or start angle, length)
    pieces = [
        ("line", (lx / 2, 0.0), (0.0, 1.0), hy),
        ("arc", (hx, hy), 0.0, arc),
        ("line", (hx, ly / 2), (-1.0, 0.0), 2 * hx),
        ("arc", (-hx, hy), 0.5 * math.pi, arc),
        ("line", (-lx / 2, hy), (0.0, -1.0), 2 * hy),
        ("arc", (-hx, -hy), math.pi, arc),
        ("line", (-hx, -ly / 2), (1.0, 0.0), 2 * hx),
        ("arc", (hx, -hy), 1.5 * math.pi, arc),
        ("line", (lx / 2, -hy), (0.0, 1.0), hy),
    ]
    bounds = np.concatenate([[0.0], np.cumsum([p[3] for p in pieces])])
    index = np.clip(np.searchsorted(bounds, s, side="right") - 1, 0, len(pieces) - 1)
    out = np.empty((s.size, 2))
    for i, (kind, anchor, direction, _) in enumerate(pieces):
        mask = index == i
        local = s[mask] - bounds[i]
        if kind == "line":
            out[mask, 0] = anchor[0] + direction[0] * local
            out[mask, 1] = anchor[1] + direction[1] * local
        else:
            angle = direction + local / rho
            out[mask, 0] = anchor[0] + rho * np.cos(angle)
            out[mask, 1] = anchor[1] + rho * np.sin(angle)
    return out


def make_stripe(a: float, m: float, rho: float = 0.0, n_modes: int = 256) -> JordanCurve:
    """
    Rectangle (-am/2, am/2) x (-1/(2a), 1/(2a)) as a Fourier curve.

    With rho > 0 the corners are quarter circles of radius rho; the curve is
    then dilated about its center so that its area is exactly m. With rho = 0
    the corners are kept sharp through a corner-slowing parametrization and the
    curve is flagged non-smooth.

    Raises:
        ValidationError: If rho >= min(am, 1/a)/2
    """
    a = validate_positive(a, "a")
    m = validate_positive(m, "m")
    rho = validate_positive(rho, "rho", allow_zero=True)
    lx, ly = a * m, 1.0 / a
    if rho >= 0.5 * min(lx, ly):
        raise ValidationError(f"corner radius {rho} must be < min(am, 1/a)/2 = {0.5 * min(lx, ly)}")

    samples = max(16 * n_modes, 4096)
    if rho == 0.0:
        points = _rectangle_points(lx, ly, samples)
        curve = JordanCurve.from_samples(points, n_modes=n_modes, smooth=False)
    else:
        perimeter = 2 * (lx + ly) - 8 * rho + 2 * math.pi * rho
        s = perimeter * np.arange(samples) / samples
        points = _rounded_rectangle_points(lx, ly, rho, s)
        curve = JordanCurve.from_samples(points, n_modes=n_modes, filter_order=16)
    return curve.dilate(math.sqrt(m / curve.signed_area))


# -- polyline tests ---------------------------------------------------------

def _orientation(p, q, r) -> np.ndarray:
    return np.sign((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
                   - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))


def _segments_cross(a0, a1, b0, b1) -> np.ndarray:
    """Proper crossings between segment sets a (rows) and b (columns)."""
    A0, A1 = a0[:, None, :], a1[:, None, :]
    B0, B1 = b0[None, :, :], b1[None, :, :]
    o1 = _orientation(A0, A1, B0)
    o2 = _orientation(A0, A1, B1)
    o3 = _orientation(B0, B1, A0)
    o4 = _orientation(B0, B1, A1)
    return (o1 * o2 < 0) & (o3 * o4 < 0)


def polyline_self_intersects(points: np.ndarray) -> bool:
    """True when two non-adjacent edges of the closed polyline cross."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    starts, ends = points, np.roll(points, -1, axis=0)
    idx = np.arange(n)
    for lo in range(0, n, _CHUNK):
        rows = idx[lo : lo + _CHUNK]
        hits = _segments_cross(starts[rows], ends[rows], starts, ends)
        gap = np.abs(rows[:, None] - idx[None, :])
        gap = np.minimum(gap, n - gap)
        if np.any(hits & (gap > 1)):
            return True
    return False


def polylines_intersect(p: np.ndarray, q: np.ndarray) -> bool:
    """True when any edge of closed polyline p crosses an edge of q."""
    p_end, q_end = np.roll(p, -1, axis=0), np.roll(q, -1, axis=0)
    for lo in range(0, p.shape[0], _CHUNK):
        if np.any(_segments_cross(p[lo : lo + _CHUNK], p_end[lo : lo + _CHUNK], q, q_end)):
            return True
    return False


def validate_curve(curve: JordanCurve, samples: Optional[int] = None) -> None:
    """
    Check orientation and simplicity of a curve.

    Raises:
        GeometryError: If the curve is negatively oriented or self-intersecting
    """
    if curve.signed_area <= 0:
        raise GeometryError(
            f"curve must be positively oriented (signed area {curve.signed_area:.6g})"
        )
    if polyline_self_intersects(curve.polyline(samples)):
        raise GeometryError("curve is self-intersecting")

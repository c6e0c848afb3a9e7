"""
Result writers: RFC-4180 CSV tables, JSON documents and SVG plots.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from dipolar.geometry.shapes import ShapeConfig  # noqa: E402
from dipolar.services.phase_service import CRITICAL_ELL, PhasePoint, phase_curves  # noqa: E402

logger = logging.getLogger(__name__)

PHASE_FIELDS = ["ell", "a_opt", "f_disk_min", "f_stripe", "winner", "M_est"]
TRACE_FIELDS = ["step", "energy", "residual", "area", "dt"]

PathLike = Union[str, Path]


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if hasattr(value, "value"):
        return value.value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def write_csv(path: PathLike, rows: Iterable[Dict[str, Any]], fieldnames: Sequence[str]) -> Path:
    """Write dict rows as RFC-4180 CSV (CRLF line ends, minimal quoting)."""
    path = _prepare(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_cell(row.get(name)) for name in fieldnames])
    logger.debug(f"Wrote CSV {path}")
    return path


def to_json_text(data: Any) -> str:
    return json.dumps(data, indent=2, default=_json_default)


def write_json(path: PathLike, data: Any) -> Path:
    path = _prepare(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, default=_json_default)
    logger.debug(f"Wrote JSON {path}")
    return path


def write_phase_csv(path: PathLike, points: Sequence[PhasePoint]) -> Path:
    return write_csv(path, (p.to_dict() for p in points), PHASE_FIELDS)


def write_flow_trace(path: PathLike, rows: List[Dict[str, Any]]) -> Path:
    return write_csv(path, rows, TRACE_FIELDS)


def _save_svg(fig, path: PathLike) -> Path:
    path = _prepare(path)
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.debug(f"Wrote SVG {path}")
    return path


def plot_phase_svg(path: PathLike, ell: float, a_values: Optional[Sequence[float]] = None,
                   a_opt: Optional[float] = None) -> Path:
    """f_disk and f_stripe against a at one layer separation."""
    if a_values is None:
        a_values = np.linspace(0.01, 3.0, 300)
    disk, stripe = phase_curves(ell, a_values)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(a_values, disk, label="f_disk")
    ax.plot(a_values, stripe, label="f_stripe")
    if a_opt is not None:
        ax.axvline(a_opt, color="gray", linestyle="--", linewidth=0.8, label="a_opt")
    ax.axhline(0.0, color="black", linewidth=0.5)
    ax.set_xlabel("a")
    ax.set_ylabel("energy per mass")
    regime = "above" if ell > CRITICAL_ELL else "below"
    ax.set_title(f"l = {ell:g} ({regime} 2/e^2)")
    ax.legend()
    return _save_svg(fig, path)


def plot_scan_svg(path: PathLike, points: Sequence[PhasePoint]) -> Path:
    """Minimal disk energy per mass and stripe energy per mass across a scan."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ells = [p.ell for p in points]
    ax.plot(ells, [p.f_disk_min for p in points], marker="o", label="min f_disk")
    ax.plot(ells, [p.f_stripe_at_a_opt for p in points], marker="s", label="f_stripe(a_opt)")
    ax.axvline(CRITICAL_ELL, color="gray", linestyle="--", linewidth=0.8)
    ax.set_xlabel("l")
    ax.set_ylabel("energy per mass")
    ax.legend()
    return _save_svg(fig, path)


def plot_shape_svg(path: PathLike, config: ShapeConfig, title: str = "") -> Path:
    """Outline of every finitely placed component; far components are drawn side by side."""
    fig, ax = plt.subplots(figsize=(5, 5))
    shift = 0.0
    for component in config.components:
        outline = component.placed_curve.polyline()
        if component.far:
            outline = outline - outline.min(axis=0) + np.array([shift, 0.0])
            shift = outline[:, 0].max() + 0.5
        closed = np.vstack([outline, outline[:1]])
        ax.plot(closed[:, 0], closed[:, 1])
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    return _save_svg(fig, path)


def plot_trace_svg(path: PathLike, rows: List[Dict[str, Any]]) -> Path:
    """Energy and residual against the step index."""
    steps = [row["step"] for row in rows]
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    top.plot(steps, [row["energy"] for row in rows])
    top.set_ylabel("energy")
    bottom.semilogy(steps, [max(row["residual"], 1e-300) for row in rows])
    bottom.set_ylabel("residual")
    bottom.set_xlabel("step")
    return _save_svg(fig, path)


def frame_recorder(directory: PathLike, every: int = 50) -> Callable:
    """Flow callback that stores an SVG frame of the curve every ``every`` steps."""
    directory = Path(directory)

    def record(state) -> None:
        if state.step % every == 0:
            config = ShapeConfig.from_curves(state.jordan)
            plot_shape_svg(directory / f"frame_{state.step:06d}.svg", config,
                           title=f"step {state.step}")

    return record

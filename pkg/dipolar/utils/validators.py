"""
Input validation utilities for dipolar.

This module provides functions for validating numeric inputs against the
preconditions of the kernels, geometry and energy modules.
"""

import math
from typing import Any, Iterable

import numpy as np

from dipolar.utils.exceptions import ValidationError


def validate_positive(value: Any, name: str, allow_zero: bool = False) -> float:
    """
    Validate that a value is a finite positive real.

    Args:
        value: Value to validate
        name: Parameter name used in the error message
        allow_zero: Whether 0 is accepted

    Returns:
        The value as float

    Raises:
        ValidationError: If the value is not a finite positive number
    """
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a real number, got {value!r}")

    if not math.isfinite(number):
        raise ValidationError(f"{name} must be finite, got {number}")
    if number < 0 or (number == 0 and not allow_zero):
        bound = "nonnegative" if allow_zero else "positive"
        raise ValidationError(f"{name} must be {bound}, got {number}")
    return number


def validate_interval(value: Any, name: str, low: float, high: float,
                      closed_low: bool = False, closed_high: bool = False) -> float:
    """
    Validate that a real value lies in an interval.

    Args:
        value: Value to validate
        name: Parameter name used in the error message
        low: Lower end of the interval
        high: Upper end of the interval
        closed_low: Whether ``low`` itself is admissible
        closed_high: Whether ``high`` itself is admissible

    Raises:
        ValidationError: If the value is outside the interval
    """
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a real number, got {value!r}")

    above = number >= low if closed_low else number > low
    below = number <= high if closed_high else number < high
    if not (above and below and math.isfinite(number)):
        left = "[" if closed_low else "("
        right = "]" if closed_high else ")"
        raise ValidationError(f"{name} must lie in {left}{low}, {high}{right}, got {number}")
    return number


def validate_radii(r: Any, name: str = "r") -> np.ndarray:
    """Validate distances for singular kernels (r > 0 everywhere)."""
    radii = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(radii)):
        raise ValidationError(f"{name} must be finite")
    if np.any(radii <= 0):
        raise ValidationError(f"{name} must be > 0 for singular kernels (coincident points)")
    return radii


def validate_node_count(n: Any, minimum: int = 16) -> int:
    """
    Validate a boundary node count.

    Args:
        n: Requested node count
        minimum: Smallest admissible count

    Raises:
        ValidationError: If n is not an integer >= minimum
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValidationError(f"node count must be an integer, got {n!r}")
    if n < minimum:
        raise ValidationError(f"node count must be >= {minimum}, got {n}")
    return int(n)


def validate_grid(values: Iterable[Any], name: str, minimum: float = 0.0) -> list:
    """Validate a list of scan values, each strictly above ``minimum``."""
    checked = []
    for value in values:
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} must be a real number, got {value!r}")
        if not number > minimum:
            raise ValidationError(f"{name} values must be > {minimum}, got {number}")
        checked.append(number)
    return checked


def parse_range(text: str) -> list:
    """
    Parse a scan range ``start:stop:step`` (inclusive stop) or a comma list.

    Args:
        text: Range text, for example ``0.275:0.5:0.005`` or ``0.28,0.3``

    Returns:
        List of floats

    Raises:
        ValidationError: If the text cannot be parsed
    """
    text = (text or "").strip()
    if not text:
        return []
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise ValueError("step must be positive and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise ValidationError(f"Invalid range '{text}': {e}")

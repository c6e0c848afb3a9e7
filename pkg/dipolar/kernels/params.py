"""Kernel parameter triple (lambda, delta, ell)."""

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Union

from dipolar.utils.exceptions import ValidationError
from dipolar.utils.validators import validate_positive


class LayerSeparation(enum.Enum):
    """Explicit marker for an infinite layer separation (pure dipolar kernel)."""

    INFINITE = "inf"

    def __str__(self) -> str:
        return self.value


Ell = Union[float, LayerSeparation]


def parse_ell(value: Any) -> Ell:
    """
    Parse a layer separation from user input.

    Args:
        value: A positive number, ``"inf"``, ``math.inf``, ``None`` or the enum

    Returns:
        A positive float or ``LayerSeparation.INFINITE``

    Raises:
        ValidationError: If the value is not a positive number or infinity
    """
    if value is None or value is LayerSeparation.INFINITE:
        return LayerSeparation.INFINITE
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "∞"):
        return LayerSeparation.INFINITE
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"ell must be positive or 'inf', got {value!r}")
    if math.isinf(number) and number > 0:
        return LayerSeparation.INFINITE
    return validate_positive(number, "ell")


@dataclass(frozen=True)
class KernelParams:
    """
    Dipolar strength ``lam``, cutoff length ``delta`` and layer separation ``ell``.

    ``lam = 0`` is admitted and switches the nonlocal term off. Parameter sets
    produced by rescaling may carry a cutoff in [1/2, 1); they are built with
    ``wide_cutoff=True`` and are otherwise identical.
    """

    lam: float
    delta: float
    ell: Ell = LayerSeparation.INFINITE
    wide_cutoff: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        lam = validate_positive(self.lam, "lambda", allow_zero=True)
        delta = validate_positive(self.delta, "delta")
        upper = 1.0 if self.wide_cutoff else 0.5
        if delta >= upper:
            raise ValidationError(f"delta must lie in (0, {upper}), got {delta}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "ell", parse_ell(self.ell))

    @property
    def log_delta(self) -> float:
        """|log delta|, the renormalization of the dipolar strength."""
        return abs(math.log(self.delta))

    @property
    def beta(self) -> float:
        return self.lam / self.log_delta

    @property
    def prefactor(self) -> float:
        """lambda / (2 |log delta|), the factor in front of every nonlocal term."""
        return 0.5 * self.beta

    @property
    def layered(self) -> bool:
        return self.ell is not LayerSeparation.INFINITE

    @property
    def ell_value(self) -> float:
        return math.inf if not self.layered else float(self.ell)

    def with_lambda(self, lam: float) -> "KernelParams":
        return KernelParams(lam, self.delta, self.ell, wide_cutoff=self.wide_cutoff)

    def with_delta(self, delta: float) -> "KernelParams":
        return KernelParams(self.lam, delta, self.ell, wide_cutoff=self.wide_cutoff)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "delta": self.delta,
            "ell": "inf" if not self.layered else self.ell,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KernelParams":
        if "delta" not in data:
            raise ValidationError("kernel parameters require 'delta'")
        return cls(data.get("lambda", 1.0), data["delta"], data.get("ell"))

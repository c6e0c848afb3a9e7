"""
Base interface for energy evaluators.
"""

import enum
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from dipolar.geometry.shapes import ShapeConfig
from dipolar.kernels.params import KernelParams

logger = logging.getLogger(__name__)


class EvaluatorTag(str, enum.Enum):
    GRID = "GRID"
    BOUNDARY = "BOUNDARY"
    GAMMA_LIMIT = "GAMMA_LIMIT"
    GAMMA_LIMIT_MODIFIED = "GAMMA_LIMIT_MODIFIED"
    GAMMA_LIMIT_SUBCRITICAL = "GAMMA_LIMIT_SUBCRITICAL"


@dataclass
class EnergyBreakdown:
    """Perimeter term, nonlocal term and their sum for one evaluator run."""

    perimeter_term: float
    nonlocal_term: float
    evaluator: EvaluatorTag
    params: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)
    total: float = field(init=False)

    def __post_init__(self):
        self.perimeter_term = float(self.perimeter_term)
        self.nonlocal_term = float(self.nonlocal_term)
        self.evaluator = EvaluatorTag(self.evaluator)
        self.total = self.perimeter_term + self.nonlocal_term

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "perimeter": self.perimeter_term,
            "nonlocal": self.nonlocal_term,
            "total": self.total,
            "evaluator": self.evaluator.value,
            "params": self.params,
            "details": self.details,
        }


class BaseEvaluator(ABC):
    """Abstract base class for energy evaluators."""

    tag: EvaluatorTag

    def __init__(self, workers: int = 1):
        """
        Initialize base evaluator.

        Args:
            workers: Number of threads used for row-chunked pair sums
        """
        self.workers = max(1, int(workers))

    @abstractmethod
    def evaluate(self, config: ShapeConfig, params: Optional[KernelParams]) -> EnergyBreakdown:
        """
        Evaluate the energy of a shape.

        Args:
            config: Shape to evaluate
            params: Kernel parameters (ignored by the curve-form limits)

        Returns:
            EnergyBreakdown tagged with this evaluator

        Raises:
            DipolarError: If the shape or parameters violate a precondition
        """
        pass

    def is_applicable(self, config: ShapeConfig, params: Optional[KernelParams]) -> bool:
        """
        Check whether this evaluator accepts the shape and parameters.

        Returns:
            True if ``evaluate`` can run on the input
        """
        return not config.empty

    def get_unavailable_message(self, config: ShapeConfig, params: Optional[KernelParams]) -> str:
        return f"{self.tag.value} evaluator does not apply to this input"

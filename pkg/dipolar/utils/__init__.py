"""Utility modules: exceptions and input validators."""

from dipolar.utils.exceptions import (
    DipolarError,
    ValidationError,
    ConfigurationError,
    GeometryError,
    ResolutionError,
    FlowAbortedError,
    VerificationError,
)

__all__ = [
    "DipolarError",
    "ValidationError",
    "ConfigurationError",
    "GeometryError",
    "ResolutionError",
    "FlowAbortedError",
    "VerificationError",
]

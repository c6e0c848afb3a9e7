"""
Custom exceptions for the dipolar package.
"""

import logging
from typing import Any, Optional

logger = logging.getLogger(__name__)

# Process exit codes used by the command line front end
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class DipolarError(Exception):
    """Base exception for the dipolar package."""
    pass


class ValidationError(DipolarError):
    """Raised when an input violates a documented precondition."""
    pass


class ConfigurationError(DipolarError):
    """Raised when configuration is invalid or missing."""
    pass


class GeometryError(DipolarError):
    """Raised for degenerate, mis-oriented or self-intersecting shapes."""
    pass


class ResolutionError(GeometryError):
    """Raised when a discretization cannot resolve the shape or kernel."""

    def __init__(self, message: str, hint: Optional[str] = None):
        super().__init__(message if hint is None else f"{message} (hint: {hint})")
        self.hint = hint


class FlowAbortedError(DipolarError):
    """Raised when a gradient flow cannot continue; keeps the last valid state."""

    def __init__(self, message: str, state: Any = None):
        super().__init__(message)
        self.state = state


class VerificationError(DipolarError):
    """Raised when one or more property checks fail."""

    def __init__(self, message: str, failures: Optional[list] = None):
        super().__init__(message)
        self.failures = failures or []


def handle_cli_error(error: BaseException) -> int:
    """
    Log an error raised by a command and map it to a process exit code.

    Args:
        error: The exception raised while running a command

    Returns:
        Exit code for the process
    """
    if isinstance(error, SystemExit):
        return int(error.code or 0)

    if isinstance(error, ConfigurationError):
        logger.error(f"Configuration error: {error}")
        return EXIT_USAGE

    if isinstance(error, ValidationError):
        logger.warning(f"Validation error: {error}")
        return EXIT_FAILURE

    if isinstance(error, VerificationError):
        logger.error(f"Verification failed: {error}")
        for failure in error.failures:
            logger.error(f"  failed check: {failure}")
        return EXIT_FAILURE

    if isinstance(error, DipolarError):
        logger.error(f"{error.__class__.__name__}: {error}")
        return EXIT_FAILURE

    logger.error(f"Unexpected error: {error}", exc_info=True)
    return EXIT_FAILURE

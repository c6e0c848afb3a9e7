"""Test configuration and fixtures."""

import math
import os
import tempfile
from pathlib import Path

import numpy as np
import pytest

os.environ.setdefault("DIPOLAR_ENV", "testing")

from dipolar.config import TestingConfig  # noqa: E402
from dipolar.geometry import ShapeConfig, make_disk, make_ellipse, make_stripe  # noqa: E402
from dipolar.kernels import KernelParams  # noqa: E402


@pytest.fixture
def temp_dir():
    """Create temporary directory for tests."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


@pytest.fixture
def testing_config():
    return TestingConfig


@pytest.fixture
def params():
    """Critical strength, moderate cutoff, pure dipolar kernel."""
    return KernelParams(1.0, 1e-2)


@pytest.fixture
def layered_params():
    return KernelParams(1.0, 1e-2, 2.0)


@pytest.fixture
def unit_disk():
    return make_disk(1.0)


@pytest.fixture
def disk_config(unit_disk):
    return ShapeConfig.from_curves(unit_disk)


@pytest.fixture
def ellipse_config():
    """Ellipse of aspect 1.5 and area pi."""
    return ShapeConfig.from_curves(make_ellipse(math.sqrt(1.5), 1.0 / math.sqrt(1.5)))


@pytest.fixture
def rounded_stripe_config():
    return ShapeConfig.from_curves(make_stripe(0.5, 8.0, 0.3))


@pytest.fixture
def rng():
    return np.random.default_rng(TestingConfig.SEED)

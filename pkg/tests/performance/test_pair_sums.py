"""Timing checks for the quadratic pair sums."""

import time

import pytest

from dipolar.evaluators import energy_boundary, gamma_limit_energy
from dipolar.evaluators.grid_evaluator import interior_pair_sum
from dipolar.geometry import ShapeConfig, make_disk, rasterize
from dipolar.kernels import KernelParams

pytestmark = [pytest.mark.performance, pytest.mark.slow]


def timed(func, *args, **kwargs):
    start = time.perf_counter()
    value = func(*args, **kwargs)
    return value, time.perf_counter() - start


def test_correlation_beats_direct_sum():
    raster = rasterize(ShapeConfig.from_curves(make_disk(1.0)), 0.025)
    params = KernelParams(1.0, 0.1)
    direct, direct_seconds = timed(interior_pair_sum, raster, params, direct_limit=raster.count)
    fast, fast_seconds = timed(interior_pair_sum, raster, params, direct_limit=0)
    assert fast == pytest.approx(direct, rel=1e-10)
    assert fast_seconds < direct_seconds


def test_boundary_energy_at_default_resolution(disk_config):
    _, seconds = timed(energy_boundary, disk_config, KernelParams(1.0, 1e-3), 512)
    assert seconds < 30.0


def test_threaded_rows_match_serial(disk_config):
    serial, _ = timed(gamma_limit_energy, disk_config, 1024, 1)
    threaded, _ = timed(gamma_limit_energy, disk_config, 1024, 4)
    assert threaded.total == pytest.approx(serial.total, rel=1e-12)

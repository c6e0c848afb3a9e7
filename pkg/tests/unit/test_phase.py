"""Unit tests for the disk/stripe phase comparison."""

import math

import numpy as np
import pytest

from dipolar.services.ansatz_service import f_disk
from dipolar.services.phase_service import (
    CRITICAL_ELL,
    MASS_FLOOR,
    PhasePoint,
    Winner,
    compare_phases,
    crossover_scan,
    disk_assembly,
    disk_assembly_check,
    find_optimal_disk_scale,
    mass_threshold,
    phase_curves,
)
from dipolar.utils.exceptions import ValidationError


@pytest.mark.unit
class TestOptimalDiskScale:
    @pytest.mark.parametrize("offset, expected", [
        (0.005, 0.336216),
        (0.01, 0.491644),
        (0.02, 0.709638),
        (0.05, 1.09911),
    ])
    def test_known_minimizers(self, offset, expected):
        assert find_optimal_disk_scale(CRITICAL_ELL + offset) == pytest.approx(expected, rel=1e-5)

    def test_minimizer_is_stationary(self):
        ell = CRITICAL_ELL + 0.02
        a = find_optimal_disk_scale(ell)
        assert f_disk(a, ell) <= f_disk(0.99 * a, ell)
        assert f_disk(a, ell) <= f_disk(1.01 * a, ell)

    @pytest.mark.parametrize("ell", [0.1, CRITICAL_ELL, 0.25])
    def test_degenerate_below_threshold(self, ell):
        assert find_optimal_disk_scale(ell) is None

    def test_rejects_nonpositive(self):
        with pytest.raises(ValidationError):
            find_optimal_disk_scale(0.0)


@pytest.mark.unit
class TestComparePhases:
    @pytest.mark.parametrize("offset", [0.005, 0.01, 0.02, 0.05])
    def test_stripes_win_near_threshold(self, offset):
        point = compare_phases(CRITICAL_ELL + offset)
        assert point.winner is Winner.STRIPE
        assert point.f_stripe_at_a_opt < point.f_disk_min

    def test_degenerate_point(self):
        point = compare_phases(0.25)
        assert point.winner is Winner.DEGENERATE
        assert point.m_est is None

    def test_scan_across_threshold_is_finite(self):
        points = crossover_scan([0.25, 0.2707, 0.28, 0.3, 0.5, 1.0])
        assert points[0].winner is Winner.DEGENERATE
        assert math.isfinite(points[0].f_disk_min)
        for point in points[1:]:
            assert point.winner is not Winner.DEGENERATE
            assert all(np.isfinite([point.a_opt, point.f_disk_min, point.f_stripe_at_a_opt]))
            assert point.f_disk_min < 0.0

    def test_row_layout(self):
        data = compare_phases(CRITICAL_ELL + 0.01).to_dict()
        assert list(data) == ["ell", "a_opt", "f_disk_min", "f_stripe", "winner", "M_est"]
        assert data["winner"] == "STRIPE"


@pytest.mark.unit
class TestMassThreshold:
    @pytest.mark.parametrize("offset, doubling", [
        (0.005, 1024.0),
        (0.01, 256.0),
        (0.02, 128.0),
        (0.05, 64.0),
    ])
    def test_first_winning_doubling(self, offset, doubling):
        mass = mass_threshold(CRITICAL_ELL + offset)
        assert 0.5 * doubling < mass <= doubling

    def test_threshold_shrinks_away_from_critical_separation(self):
        masses = [mass_threshold(CRITICAL_ELL + offset) for offset in (0.005, 0.01, 0.02, 0.05)]
        assert all(a > b for a, b in zip(masses, masses[1:]))

    def test_floor_when_stripes_always_win(self, mocker, caplog):
        mocker.patch("dipolar.services.phase_service.stripe_energy_modified", return_value=-1e12)
        with caplog.at_level("WARNING", logger="dipolar.services.phase_service"):
            assert mass_threshold(CRITICAL_ELL + 0.01) == MASS_FLOOR
        assert "mass floor" in caplog.text

    def test_requires_stripe_phase(self):
        with pytest.raises(ValidationError):
            mass_threshold(0.25)

    def test_cap(self, mocker):
        mocker.patch("dipolar.services.phase_service.MASS_CAP", 4.0)
        assert mass_threshold(CRITICAL_ELL + 0.01) is None


@pytest.mark.unit
class TestScan:
    def test_order_and_threads(self):
        grid = [CRITICAL_ELL + 0.05, 0.25, CRITICAL_ELL + 0.01]
        serial = crossover_scan(grid)
        threaded = crossover_scan(grid, workers=3)
        assert [p.ell for p in threaded] == grid
        assert [p.winner for p in serial] == [Winner.STRIPE, Winner.DEGENERATE, Winner.STRIPE]
        assert [p.a_opt for p in serial] == [p.a_opt for p in threaded]

    def test_with_mass(self):
        points = crossover_scan([CRITICAL_ELL + 0.05, 0.25], with_mass=True)
        assert 32.0 < points[0].m_est <= 64.0
        assert points[1].m_est is None

    def test_rejects_bad_grid(self):
        with pytest.raises(ValidationError):
            crossover_scan([0.3, -1.0])

    def test_phase_curves(self):
        disk, stripe = phase_curves(0.3, [0.2, 0.5, 1.0])
        assert disk.shape == stripe.shape == (3,)
        assert disk[1] == pytest.approx(f_disk(0.5, 0.3))


@pytest.mark.unit
class TestDiskAssembly:
    def test_assembly_layout(self):
        config = disk_assembly(0.3, 3, a_opt=0.5)
        assert len(config.components) == 3
        assert all(c.far for c in config.components)
        assert config.mass == pytest.approx(3.0 * math.pi * 4.0)

    def test_assembly_needs_disks(self):
        with pytest.raises(ValidationError):
            disk_assembly(0.3, 0, a_opt=0.5)

    def test_degenerate_has_no_assembly(self):
        with pytest.raises(ValidationError):
            disk_assembly_check(0.25, 2)

    @pytest.mark.slow
    def test_assembly_energy_is_additive(self):
        energy, expected = disk_assembly_check(CRITICAL_ELL + 0.05, 2)
        assert energy == pytest.approx(expected, rel=1e-4)


@pytest.mark.unit
def test_phase_point_defaults():
    point = PhasePoint(0.3, 0.5, -1.0, -1.1, Winner.STRIPE)
    assert point.to_dict()["M_est"] is None

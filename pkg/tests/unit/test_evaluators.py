"""Unit tests for the evaluator plug-ins and the shared boundary quadrature."""

import math

import numpy as np
import pytest

from dipolar.evaluators import (
    BoundaryEvaluator,
    EnergyBreakdown,
    EvaluatorTag,
    GammaLimitEvaluator,
    GridEvaluator,
    ModifiedGammaLimitEvaluator,
    SubcriticalGammaLimitEvaluator,
    energy_boundary,
    energy_grid,
    gamma_limit_energy,
    gamma_limit_energy_modified,
    gamma_limit_subcritical,
    potential_on_boundary,
    potentials_at_nodes,
)
from dipolar.evaluators.boundary_evaluator import sample_config
from dipolar.evaluators.gamma_evaluator import required_nodes
from dipolar.evaluators.grid_evaluator import interior_pair_sum, lattice_total_mass
from dipolar.evaluators.quadrature import exact_sum, interacting_pairs, map_rows
from dipolar.geometry import ShapeConfig, make_disk, make_stripe, rasterize, sample_arclength
from dipolar.kernels import KernelParams
from dipolar.services.ansatz_service import disk_energy_gamma
from dipolar.services.energy_service import disk_energy_delta
from dipolar.utils.exceptions import GeometryError, ResolutionError, ValidationError

DISK_GAMMA = -2.0 * math.pi * math.log(4.0)


def analytic_disk_potential(params: KernelParams) -> float:
    theta = math.acos(0.5 * params.delta)
    secant = 1.0 / math.cos(theta)
    return params.prefactor * (2.0 * theta / params.delta - math.log(secant + math.tan(theta)))


@pytest.mark.unit
class TestEnergyBreakdown:
    def test_total_and_dict(self):
        result = EnergyBreakdown(2.0, -0.5, EvaluatorTag.BOUNDARY, {"lambda": 1.0})
        assert result.total == 1.5
        data = result.to_dict()
        assert data["total"] == 1.5
        assert data["evaluator"] == "BOUNDARY"
        assert set(data) == {"perimeter", "nonlocal", "total", "evaluator", "params", "details"}

    def test_tag_from_string(self):
        assert EnergyBreakdown(1.0, 0.0, "GRID").evaluator is EvaluatorTag.GRID


@pytest.mark.unit
class TestQuadratureHelpers:
    def test_map_rows_preserves_order(self):
        def rows(chunk):
            return np.arange(1000)[chunk] * 2.0

        serial = map_rows(1000, rows, workers=1)
        threaded = map_rows(1000, rows, workers=4)
        np.testing.assert_array_equal(serial, threaded)
        np.testing.assert_array_equal(serial, np.arange(1000) * 2.0)

    def test_exact_sum(self):
        assert exact_sum(np.array([1e16, 1.0, -1e16])) == 1.0

    def test_interacting_pairs(self):
        assert interacting_pairs([False, True, False]) == [(0, 2)]
        assert interacting_pairs([True, True]) == []


@pytest.mark.unit
class TestBoundaryEvaluator:
    def test_disk_matches_radial_quadrature(self, disk_config, params):
        result = energy_boundary(disk_config, params, 512)
        assert result.evaluator is EvaluatorTag.BOUNDARY
        assert result.perimeter_term == pytest.approx(2.0 * math.pi, rel=1e-12)
        assert result.total == pytest.approx(disk_energy_delta(1.0, params), rel=1e-5)

    def test_layered_disk_matches_radial_quadrature(self, disk_config, layered_params):
        result = energy_boundary(disk_config, layered_params, 512)
        assert result.total == pytest.approx(disk_energy_delta(1.0, layered_params), rel=1e-5)

    def test_scaled_energy_above_limit(self, disk_config):
        scaled = []
        for delta in (1e-2, 1e-3):
            params = KernelParams(1.0, delta)
            scaled.append(params.log_delta * energy_boundary(disk_config, params, 256).total)
        assert scaled[1] < scaled[0]
        assert all(value > DISK_GAMMA for value in scaled)

    def test_lambda_zero_is_perimeter(self, ellipse_config):
        result = energy_boundary(ellipse_config, KernelParams(0.0, 0.01), 128)
        assert result.nonlocal_term == 0.0
        assert result.total == pytest.approx(result.perimeter_term)

    def test_far_components_are_additive(self, params):
        single = energy_boundary(ShapeConfig.from_curves(make_disk(1.0)), params, 256).total
        pair = ShapeConfig.from_curves(make_disk(1.0), make_disk(1.0), far=True)
        assert energy_boundary(pair, params, 256).total == pytest.approx(2.0 * single, rel=1e-12)

    def test_finite_pair_interacts(self, params):
        single = energy_boundary(ShapeConfig.from_curves(make_disk(1.0)), params, 256).total
        pair = ShapeConfig.from_curves(make_disk(1.0, center=(-1.5, 0.0)), make_disk(1.0, center=(1.5, 0.0)))
        assert energy_boundary(pair, params, 256).total != pytest.approx(2.0 * single, rel=1e-9)

    def test_worker_count_does_not_change_total(self, ellipse_config, params):
        serial = energy_boundary(ellipse_config, params, 256, workers=1).total
        threaded = energy_boundary(ellipse_config, params, 256, workers=3).total
        assert serial == threaded

    def test_sharp_stripe_rejected(self, params):
        config = ShapeConfig.from_curves(make_stripe(1.0, 4.0))
        with pytest.raises(GeometryError):
            energy_boundary(config, params)

    def test_empty_config(self, params):
        assert energy_boundary(ShapeConfig(()), params).total == 0.0

    def test_plugin_applicability(self, disk_config, params):
        evaluator = BoundaryEvaluator(nodes=128)
        assert evaluator.is_applicable(disk_config, params)
        assert not evaluator.is_applicable(disk_config, None)
        assert "--delta" in evaluator.get_unavailable_message(disk_config, None)
        with pytest.raises(ValidationError):
            evaluator.evaluate(disk_config, None)


@pytest.mark.unit
class TestBoundaryPotential:
    def test_disk_potential_is_constant_and_analytic(self):
        params = KernelParams(1.0, 0.05)
        curves = sample_config(ShapeConfig.from_curves(make_disk(1.0)), 512)
        values = potentials_at_nodes(curves, params)[0]
        assert np.ptp(values) < 1e-9 * abs(values[0])
        assert values[0] == pytest.approx(analytic_disk_potential(params), rel=1e-4)

    def test_point_lookup(self):
        params = KernelParams(1.0, 0.05)
        curves = [sample_arclength(make_disk(1.0), 256)]
        value = potential_on_boundary((1.0, 0.0), curves, params)
        assert value == pytest.approx(potentials_at_nodes(curves, params)[0][0])

    def test_point_off_boundary(self, params):
        curves = [sample_arclength(make_disk(1.0), 128)]
        with pytest.raises(ValidationError):
            potential_on_boundary((0.0, 0.0), curves, params)

    def test_lambda_zero(self):
        curves = [sample_arclength(make_disk(1.0), 64)]
        np.testing.assert_array_equal(potentials_at_nodes(curves, KernelParams(0.0, 0.1))[0], 0.0)

    def test_far_flags_must_match(self, params):
        curves = [sample_arclength(make_disk(1.0), 64)]
        with pytest.raises(ValidationError):
            potentials_at_nodes(curves, params, far=[False, False])


@pytest.mark.unit
class TestGammaLimit:
    def test_unit_disk(self, disk_config):
        result = gamma_limit_energy(disk_config)
        assert result.evaluator is EvaluatorTag.GAMMA_LIMIT
        assert result.total == pytest.approx(DISK_GAMMA, abs=1e-6)

    def test_scaled_disk(self):
        result = gamma_limit_energy(ShapeConfig.from_curves(make_disk(2.0)))
        assert result.total == pytest.approx(disk_energy_gamma(2.0), abs=1e-6)

    def test_modified_disk(self, disk_config):
        result = gamma_limit_energy_modified(disk_config, 2.0)
        assert result.evaluator is EvaluatorTag.GAMMA_LIMIT_MODIFIED
        assert result.total == pytest.approx(disk_energy_gamma(1.0, 2.0), abs=1e-6)
        assert result.details["ell"] == 2.0

    def test_modified_infinite_equals_plain(self, ellipse_config):
        plain = gamma_limit_energy(ellipse_config)
        modified = gamma_limit_energy_modified(ellipse_config, "inf")
        assert modified.total == plain.total
        assert modified.evaluator is EvaluatorTag.GAMMA_LIMIT_MODIFIED

    def test_far_assembly_is_additive(self, disk_config):
        pair = ShapeConfig.from_curves(make_disk(1.0), make_disk(1.0), far=True)
        assert gamma_limit_energy(pair).total == pytest.approx(2.0 * DISK_GAMMA, abs=1e-6)

    def test_node_count_is_raised(self, ellipse_config):
        result = gamma_limit_energy(ellipse_config, n=16)
        assert result.details["nodes"][0] >= 64

    def test_required_nodes_even(self):
        n = required_nodes(sample_arclength(make_disk(1.0), 512))
        assert n % 2 == 0
        assert 2.0 * math.pi / n <= 0.02

    def test_near_contact(self, disk_config, mocker):
        mocker.patch("dipolar.evaluators.gamma_evaluator.min_far_distance", return_value=1e-6)
        with pytest.raises(ResolutionError) as excinfo:
            gamma_limit_energy(disk_config)
        assert excinfo.value.hint is not None

    def test_sharp_stripe_rejected(self):
        with pytest.raises(GeometryError):
            gamma_limit_energy(ShapeConfig.from_curves(make_stripe(1.0, 4.0)))

    def test_subcritical(self, disk_config):
        result = gamma_limit_subcritical(disk_config, 0.25)
        assert result.total == pytest.approx(0.75 * 2.0 * math.pi)
        with pytest.raises(ValidationError):
            gamma_limit_subcritical(disk_config, 1.0)

    def test_plugins(self, disk_config, layered_params):
        assert GammaLimitEvaluator().is_applicable(disk_config, None)
        modified = ModifiedGammaLimitEvaluator().evaluate(disk_config, layered_params)
        assert modified.total == pytest.approx(disk_energy_gamma(1.0, 2.0), abs=1e-6)
        sub = SubcriticalGammaLimitEvaluator()
        assert not sub.is_applicable(disk_config, KernelParams(1.5, 0.01))
        assert sub.is_applicable(disk_config, KernelParams(0.5, 0.01))


@pytest.mark.unit
class TestGridEvaluator:
    def test_lattice_mass_approaches_continuum(self):
        params = KernelParams(1.0, 0.1)
        assert lattice_total_mass(params.delta / 8.0, params) == pytest.approx(2.0 * math.pi / params.delta, rel=0.05)

    def test_direct_and_correlation_sums_agree(self):
        params = KernelParams(1.0, 0.2)
        raster = rasterize(ShapeConfig.from_curves(make_disk(0.5)), 0.05)
        direct = interior_pair_sum(raster, params, direct_limit=10 ** 6)
        correlated = interior_pair_sum(raster, params, direct_limit=0)
        assert direct == pytest.approx(correlated, rel=1e-10)

    def test_grid_close_to_boundary(self):
        params = KernelParams(1.0, 0.1)
        config = ShapeConfig.from_curves(make_disk(0.5))
        grid = GridEvaluator().evaluate(config, params)
        boundary = energy_boundary(config, params, 256)
        assert grid.evaluator is EvaluatorTag.GRID
        assert grid.perimeter_term == pytest.approx(math.pi, rel=1e-12)
        assert grid.nonlocal_term == pytest.approx(boundary.nonlocal_term, rel=0.1)

    @pytest.mark.slow
    def test_error_shrinks_with_spacing(self):
        params = KernelParams(1.0, 0.2)
        config = ShapeConfig.from_curves(make_disk(0.5))
        reference = energy_boundary(config, params, 512).total
        errors = [abs(GridEvaluator(h=params.delta / k).evaluate(config, params).total - reference)
                  for k in (4, 8, 16)]
        assert errors[1] < errors[0]
        assert errors[2] < 0.5 * errors[0]

    def test_coarse_grid_rejected(self, disk_config):
        with pytest.raises(ResolutionError):
            GridEvaluator(h=0.05).evaluate(disk_config, KernelParams(1.0, 0.1))

    def test_empty_raster(self, params):
        raster = rasterize(ShapeConfig(()), 0.001)
        assert energy_grid(raster, 0.0, params).total == 0.0

    def test_far_components_not_applicable(self, params):
        config = ShapeConfig.from_curves(make_disk(1.0), far=True)
        evaluator = GridEvaluator()
        assert not evaluator.is_applicable(config, params)
        assert "far" in evaluator.get_unavailable_message(config, params)

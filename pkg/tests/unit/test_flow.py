"""Unit tests for the shape gradient flow and the rigidity diagnostics."""

import math

import numpy as np
import pytest

from dipolar.evaluators import energy_boundary
from dipolar.geometry import ShapeConfig, make_disk, make_ellipse, make_stripe, sample_arclength
from dipolar.kernels import KernelParams
from dipolar.services.flow_service import (
    FlowState,
    circle_rigidity_check,
    gradient_flow,
    hausdorff_to_circle,
    osc_curvature,
    shape_gradient,
)
from dipolar.utils.exceptions import FlowAbortedError, GeometryError, ValidationError


@pytest.fixture
def flow_params():
    return KernelParams(0.5, 0.05)


@pytest.fixture
def mild_ellipse():
    return ShapeConfig.from_curves(make_ellipse(1.1, 1.0 / 1.1))


@pytest.mark.unit
class TestShapeGradient:
    def test_disk_is_stationary(self, flow_params):
        curve = sample_arclength(make_disk(1.0), 128)
        velocity, mu = shape_gradient(curve, flow_params)
        assert np.max(np.abs(velocity)) < 1e-9
        assert mu > 1.0

    def test_velocity_preserves_area_to_first_order(self, flow_params):
        curve = sample_arclength(make_ellipse(1.5, 1.0 / 1.5), 128)
        velocity, _ = shape_gradient(curve, flow_params)
        assert abs(np.dot(velocity, curve.ds)) < 1e-10 * curve.perimeter
        assert np.max(np.abs(velocity)) > 0.1

    def test_without_dipolar_term_is_curve_shortening(self):
        curve = sample_arclength(make_ellipse(1.5, 1.0 / 1.5), 128)
        velocity, mu = shape_gradient(curve, KernelParams(0.0, 0.05))
        mean_curvature = 2.0 * math.pi / np.sum(curve.ds)
        assert mu == pytest.approx(mean_curvature, rel=1e-10)
        np.testing.assert_allclose(velocity, -(curve.curvature - mean_curvature), atol=1e-9)

    def test_ellipse_moves_in_at_tips_and_out_at_flanks(self, flow_params):
        n = 128
        curve = sample_arclength(make_ellipse(1.5, 1.0 / 1.5), n)
        velocity, _ = shape_gradient(curve, flow_params)
        tips = [0, n // 2]
        flanks = [n // 4, 3 * n // 4]
        assert np.argmax(curve.points[:, 0]) == 0
        assert np.all(velocity[tips] < 0.0)
        assert np.all(velocity[flanks] > 0.0)

    def test_self_intersection(self, flow_params, mocker):
        mocker.patch("dipolar.services.flow_service.polyline_self_intersects", return_value=True)
        with pytest.raises(GeometryError):
            shape_gradient(sample_arclength(make_disk(1.0), 64), flow_params)


@pytest.mark.unit
class TestGradientFlow:
    def test_disk_converges_immediately(self, disk_config, flow_params):
        state = gradient_flow(disk_config, flow_params, n=64)
        assert state.converged
        assert state.step == 0
        assert state.stop_reason == "converged"
        assert len(state.energy_trace) == 1

    def test_energy_decreases_and_area_is_kept(self, mild_ellipse, flow_params):
        seen = []
        state = gradient_flow(mild_ellipse, flow_params, max_steps=5, tol=1e-12, n=64,
                              on_step=lambda s: seen.append(s.step))
        assert state.stop_reason == "max_steps"
        assert state.step == 5
        assert seen == [0, 1, 2, 3, 4, 5]
        trace = state.energy_trace
        assert all(b <= a + 1e-12 * abs(a) for a, b in zip(trace, trace[1:]))
        assert trace[-1] < trace[0]
        np.testing.assert_allclose(state.area_trace, mild_ellipse.mass, rtol=1e-10)

    def test_trace_rows_and_dict(self, mild_ellipse, flow_params):
        state = gradient_flow(mild_ellipse, flow_params, max_steps=2, tol=1e-12, n=64)
        rows = state.trace_rows()
        assert [row["step"] for row in rows] == [0, 1, 2]
        assert set(rows[0]) == {"step", "energy", "residual", "area", "dt"}
        data = state.to_dict()
        assert data["stop_reason"] == "max_steps"
        assert ShapeConfig.from_dict(data["shape"]).mass == pytest.approx(mild_ellipse.mass)

    def test_translation_equivariance(self, mild_ellipse, flow_params):
        shift = np.array([3.0, -2.0])
        base = gradient_flow(mild_ellipse, flow_params, max_steps=3, tol=1e-12, n=64)
        moved = gradient_flow(mild_ellipse.translate(*shift), flow_params, max_steps=3, tol=1e-12, n=64)
        np.testing.assert_allclose(moved.curve.points, base.curve.points + shift, atol=1e-8)
        np.testing.assert_allclose(moved.energy_trace, base.energy_trace, rtol=1e-9)
        assert moved.dt_trace == pytest.approx(base.dt_trace)

    def test_aborts_with_last_state(self, mild_ellipse, flow_params, mocker):
        mocker.patch("dipolar.services.flow_service.polyline_self_intersects", return_value=True)
        with pytest.raises(FlowAbortedError) as excinfo:
            gradient_flow(mild_ellipse, flow_params, n=64)
        assert isinstance(excinfo.value.state, FlowState)
        assert excinfo.value.state.step == 0

    def test_needs_single_finite_smooth_component(self, flow_params):
        with pytest.raises(ValidationError):
            gradient_flow(ShapeConfig.from_curves(make_disk(1.0), far=True), flow_params)
        with pytest.raises(ValidationError):
            gradient_flow(ShapeConfig.from_curves(make_stripe(1.0, 4.0)), flow_params)
        with pytest.raises(ValidationError):
            gradient_flow(ShapeConfig.from_curves(make_disk(1.0), make_disk(1.0, center=(3.0, 0.0))),
                          flow_params)

    @pytest.mark.parametrize("energy", ["GAMMA_LIMIT", "simplex"])
    def test_rejects_other_energies(self, disk_config, flow_params, energy):
        with pytest.raises(ValidationError):
            gradient_flow(disk_config, flow_params, energy=energy)


@pytest.mark.unit
class TestRigidity:
    def test_disk(self, unit_disk):
        assert osc_curvature(unit_disk) < 1e-10
        assert hausdorff_to_circle(unit_disk) < 1e-12
        report = circle_rigidity_check(unit_disk)
        assert report.radius == pytest.approx(1.0)
        assert report.position_error < 1e-10
        assert report.holds

    def test_ellipse_within_bounds(self):
        ellipse = make_ellipse(1.2, 1.0 / 1.2)
        report = circle_rigidity_check(ellipse)
        assert report.osc_kappa == pytest.approx(1.2 ** 3 - 1.2 ** -3, rel=1e-6)
        assert report.holds
        assert report.to_dict()["holds"] is True
        gap = 1.2 - 1.0 / 1.2
        assert 0.3 * gap < hausdorff_to_circle(ellipse) < gap

    def test_translated_disk(self):
        report = circle_rigidity_check(make_disk(2.0, center=(5.0, -1.0)))
        assert report.radius == pytest.approx(2.0)
        assert report.position_error < 1e-9
        assert math.isfinite(report.tangent_error)


@pytest.mark.integration
@pytest.mark.slow
class TestFlowProperties:
    def test_residual_settles_monotonically(self, mild_ellipse, flow_params):
        state = gradient_flow(mild_ellipse, flow_params, max_steps=5000, tol=1e-3, n=64)
        assert state.converged
        tail = state.residual_trace[-11:]
        assert len(tail) == 11
        assert all(b <= a * (1.0 + 1e-6) for a, b in zip(tail, tail[1:]))

    def test_rounded_stripe_stays_above_disk(self, rounded_stripe_config, flow_params):
        n = 192
        state = gradient_flow(rounded_stripe_config, flow_params, max_steps=40, tol=1e-3, n=n)
        radius = math.sqrt(rounded_stripe_config.mass / math.pi)
        disk = energy_boundary(ShapeConfig.from_curves(make_disk(radius)), flow_params, n).total
        assert state.energy < state.energy_trace[0]
        assert state.energy >= disk

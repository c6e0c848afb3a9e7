"""Unit tests for kernel parameters, radial kernels and elliptic integrals."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import ellipe, ellipk, ellipkm1

from dipolar.kernels import (
    KernelParams,
    LayerSeparation,
    elliptic_E,
    elliptic_E_m1,
    elliptic_K,
    elliptic_K_m1,
    g_cutoff,
    kernel_is_repulsive,
    kernel_K,
    kernel_mass_within,
    kernel_total_mass,
    parse_ell,
    phi_delta,
    phi_delta_l,
    phi_delta_prime,
)
from dipolar.utils.exceptions import ValidationError


@pytest.mark.unit
class TestKernelParams:
    def test_prefactor(self):
        params = KernelParams(2.0, 1e-3)
        assert params.log_delta == pytest.approx(3.0 * math.log(10.0))
        assert params.prefactor == pytest.approx(2.0 / (2.0 * 3.0 * math.log(10.0)))

    def test_default_ell_is_infinite(self):
        params = KernelParams(1.0, 0.1)
        assert params.ell is LayerSeparation.INFINITE
        assert not params.layered
        assert params.ell_value == math.inf

    @pytest.mark.parametrize("delta", [0.0, -0.1, 0.5, 0.7])
    def test_rejects_cutoff_outside_range(self, delta):
        with pytest.raises(ValidationError):
            KernelParams(1.0, delta)

    def test_wide_cutoff_admits_larger_delta(self):
        params = KernelParams(1.0, 0.7, wide_cutoff=True)
        assert params.delta == 0.7
        with pytest.raises(ValidationError):
            KernelParams(1.0, 1.0, wide_cutoff=True)

    def test_lambda_zero_allowed_negative_rejected(self):
        assert KernelParams(0.0, 0.1).prefactor == 0.0
        with pytest.raises(ValidationError):
            KernelParams(-0.5, 0.1)

    def test_dict_exchange(self):
        params = KernelParams(0.7, 0.01, 2.0)
        data = params.to_dict()
        assert data == {"lambda": 0.7, "delta": 0.01, "ell": 2.0}
        assert KernelParams.from_dict(data) == params
        assert KernelParams(1.0, 0.01).to_dict()["ell"] == "inf"

    def test_from_dict_requires_delta(self):
        with pytest.raises(ValidationError):
            KernelParams.from_dict({"lambda": 1.0})

    def test_hashable(self):
        assert hash(KernelParams(1.0, 0.01)) == hash(KernelParams(1.0, 0.01))

    def test_with_helpers(self):
        params = KernelParams(1.0, 0.01, 3.0)
        assert params.with_lambda(0.5).lam == 0.5
        assert params.with_delta(0.02).ell == 3.0


@pytest.mark.unit
class TestParseEll:
    @pytest.mark.parametrize("value", [None, "inf", "Infinity", math.inf, LayerSeparation.INFINITE])
    def test_infinite_spellings(self, value):
        assert parse_ell(value) is LayerSeparation.INFINITE

    def test_numbers(self):
        assert parse_ell("2.5") == 2.5
        assert parse_ell(3) == 3.0

    @pytest.mark.parametrize("value", [0, -1.0, "abc", -math.inf])
    def test_invalid(self, value):
        with pytest.raises(ValidationError):
            parse_ell(value)


@pytest.mark.unit
class TestRadialKernels:
    def test_g_cutoff(self):
        np.testing.assert_array_equal(g_cutoff(np.array([0.05, 0.1, 0.2]), 0.1), [0.0, 0.0, 1.0])
        assert g_cutoff(0.3, 0.1) == 1.0
        with pytest.raises(ValidationError):
            g_cutoff(-1.0, 0.1)

    def test_phi_branches(self):
        delta = 0.1
        assert phi_delta(2.0, delta) == pytest.approx(0.5)
        assert phi_delta(delta, delta) == pytest.approx(1.0 / delta)
        assert phi_delta(0.5 * delta, delta) == pytest.approx((1.0 + math.log(2.0)) / delta)

    def test_phi_is_continuously_differentiable_at_cutoff(self):
        delta = 0.1
        eps = 1e-9
        assert phi_delta_prime(delta - eps, delta) == pytest.approx(phi_delta_prime(delta + eps, delta), rel=1e-6)
        assert phi_delta_prime(delta, delta) == pytest.approx(-1.0 / delta ** 2)

    @pytest.mark.parametrize("r", [0.03, 0.5, 2.0])
    def test_radial_laplacian_matches_kernel(self, r):
        delta = 0.1
        eps = 1e-4
        second = (phi_delta(r + eps, delta) - 2.0 * phi_delta(r, delta) + phi_delta(r - eps, delta)) / eps ** 2
        laplacian = second + phi_delta_prime(r, delta) / r
        expected = kernel_K(r, KernelParams(1.0, delta))
        assert laplacian == pytest.approx(expected, abs=1e-4 * max(1.0, 1.0 / r ** 3))

    def test_singular_kernels_reject_zero(self):
        with pytest.raises(ValidationError):
            phi_delta(0.0, 0.1)
        with pytest.raises(ValidationError):
            kernel_K(np.array([1.0, 0.0]), KernelParams(1.0, 0.1))

    def test_array_in_array_out(self):
        r = np.linspace(0.05, 3.0, 7)
        out = phi_delta(r, 0.1)
        assert isinstance(out, np.ndarray) and out.shape == r.shape
        assert isinstance(phi_delta(1.0, 0.1), float)

    def test_layered_kernel(self):
        params = KernelParams(1.0, 0.1, 2.0)
        r = 1.5
        layer = (r * r - 8.0) / (r * r + 4.0) ** 2.5
        assert kernel_K(r, params) == pytest.approx(1.0 / r ** 3 - layer)
        assert phi_delta_l(r, params) == pytest.approx(1.0 / r - 1.0 / math.sqrt(r * r + 4.0))
        assert kernel_K(0.05, params) == pytest.approx(-(0.0025 - 8.0) / (0.0025 + 4.0) ** 2.5)

    def test_kernel_vanishes_inside_cutoff_without_layer(self):
        assert kernel_K(0.05, KernelParams(1.0, 0.1)) == 0.0


@pytest.mark.unit
class TestKernelMass:
    def test_total_mass(self):
        assert kernel_total_mass(KernelParams(1.0, 0.01)) == pytest.approx(200.0 * math.pi)

    @pytest.mark.parametrize("ell", ["inf", 0.7])
    def test_mass_within_matches_quadrature(self, ell):
        params = KernelParams(1.0, 0.1, ell)
        radius = 3.0

        def integrand(r):
            return 2.0 * math.pi * r * kernel_K(r, params)

        inner, _ = quad(integrand, 1e-12, params.delta, limit=200)
        outer, _ = quad(integrand, params.delta, radius, limit=200)
        assert kernel_mass_within(radius, params) == pytest.approx(inner + outer, rel=1e-8)

    def test_mass_within_tends_to_total(self):
        params = KernelParams(1.0, 0.1, 1.0)
        assert kernel_mass_within(1e6, params) == pytest.approx(kernel_total_mass(params), rel=1e-5)

    def test_mass_within_rejects_small_radius(self):
        with pytest.raises(ValidationError):
            kernel_mass_within(0.05, KernelParams(1.0, 0.1))

    def test_repulsiveness(self):
        assert kernel_is_repulsive(KernelParams(1.0, 0.1))
        assert kernel_is_repulsive(KernelParams(1.0, 0.1, 1.0))
        assert not kernel_is_repulsive(KernelParams(1.0, 0.1, 0.05))


@pytest.mark.unit
class TestEllipticIntegrals:
    def test_known_values(self):
        assert elliptic_K(0.0) == pytest.approx(0.5 * math.pi, abs=1e-15)
        assert elliptic_E(0.0) == pytest.approx(0.5 * math.pi, abs=1e-15)
        assert elliptic_K(0.5) == pytest.approx(1.854074677301372, abs=1e-14)
        assert elliptic_E(0.5) == pytest.approx(1.350643881047675, abs=1e-14)
        assert elliptic_E(1.0) == 1.0

    def test_matches_scipy_on_grid(self):
        k = np.linspace(0.0, 0.999, 50)
        np.testing.assert_allclose(elliptic_K(k), ellipk(k), rtol=1e-13)
        np.testing.assert_allclose(elliptic_E(k), ellipe(k), rtol=1e-13)

    def test_regression_value(self):
        value = 1.0 + 7.0 * elliptic_E(0.85) - 0.5 * (4.0 + 4.25) * elliptic_K(0.85)
        assert value == pytest.approx(-0.850922, abs=1e-6)

    @pytest.mark.parametrize("k", [1.0, -0.1, 1.5])
    def test_K_domain(self, k):
        with pytest.raises(ValidationError):
            elliptic_K(k)

    def test_E_domain(self):
        with pytest.raises(ValidationError):
            elliptic_E(1.01)

    def test_complement_form_near_singularity(self):
        p = np.array([1e-20, 1e-12, 1e-6, 1e-3])
        np.testing.assert_allclose(elliptic_K_m1(p), ellipkm1(p), rtol=1e-13)
        assert elliptic_K_m1(1e-300) == pytest.approx(ellipkm1(1e-300), rel=1e-13)
        np.testing.assert_allclose(elliptic_E_m1(p), ellipe(1.0 - p), rtol=1e-13)
        assert elliptic_K_m1(1e-20) == pytest.approx(math.log(4.0) + 10.0 * math.log(10.0), rel=1e-14)

    def test_complement_form_agrees_away_from_singularity(self):
        p = np.linspace(0.05, 1.0, 20)
        np.testing.assert_allclose(elliptic_K_m1(p), elliptic_K(1.0 - p), rtol=1e-13)
        np.testing.assert_allclose(elliptic_E_m1(p), elliptic_E(1.0 - p), rtol=1e-13)
        assert elliptic_E_m1(0.0) == 1.0

    @pytest.mark.parametrize("p", [0.0, -1e-3, 1.5, math.nan])
    def test_K_m1_domain(self, p):
        with pytest.raises(ValidationError):
            elliptic_K_m1(p)

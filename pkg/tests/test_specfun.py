"""Special functions and the quadrature wrapper."""

import math

import numpy as np
import pytest
from scipy import special

from scripts.specfun import (
    DomainError,
    QuadratureError,
    QuadratureSpec,
    approx_e1,
    approx_en,
    approx_lower_gamma,
    bessel_k0,
    cdf_product_gamma,
    expint_en,
    integrate_1d,
    lower_inc_gamma,
    scaled_expint_en,
    sf_product_gamma,
    upper_inc_gamma,
    DEFAULT_QUAD,
)


def test_incomplete_gammas_sum_to_complete_gamma():
    for a, x in [(0.5, 0.2), (2.5, 1.3), (3.0, 7.0)]:
        total = lower_inc_gamma(a, x) + upper_inc_gamma(a, x)
        assert total == pytest.approx(math.gamma(a), rel=1e-12)


def test_lower_inc_gamma_of_shape_one_is_exponential_cdf():
    for x in (0.01, 0.7, 4.0):
        assert lower_inc_gamma(1.0, x) == pytest.approx(-math.expm1(-x), rel=1e-12)


def test_lower_inc_gamma_rejects_bad_arguments():
    with pytest.raises(DomainError):
        lower_inc_gamma(0.0, 1.0)
    with pytest.raises(DomainError):
        upper_inc_gamma(1.0, -1.0)


def test_finite_series_matches_lower_incomplete_gamma():
    for m in range(1, 13):
        for t in (0.1, 1.0, 5.0, 20.0):
            assert approx_lower_gamma(m, t) == pytest.approx(
                lower_inc_gamma(m, t), abs=1e-12 * math.gamma(m)
            )


def test_finite_series_needs_integer_m():
    with pytest.raises(DomainError):
        approx_lower_gamma(2.5, 1.0)


def test_bessel_k0_reference_value_and_pole():
    assert bessel_k0(1.0) == pytest.approx(0.42102443824070834, rel=1e-12)
    with pytest.raises(DomainError):
        bessel_k0(0.0)


def test_bessel_k0_integral_identity():
    # ∫₀^∞ t⁻¹ e^{-t - z/t} dt = 2 K₀(2√z)
    for z in (0.05, 0.5, 1.0, 4.0, 25.0):
        pivot = math.sqrt(z)

        def integrand(t):
            return math.exp(-t - z / t) / t if t > 0 else 0.0

        head, _ = integrate_1d(integrand, 0.0, pivot, epsabs=0.0)
        tail, _ = integrate_1d(integrand, pivot, np.inf, epsabs=0.0)
        assert head + tail == pytest.approx(2.0 * bessel_k0(2.0 * pivot), rel=1e-8)


def test_expint_values_and_recurrence():
    assert expint_en(1, 1.0) == pytest.approx(0.21938393439552029, rel=1e-12)
    for n in range(1, 6):
        for z in (0.3, 2.0, 7.5):
            lhs = expint_en(n + 1, z)
            rhs = (math.exp(-z) - z * expint_en(n, z)) / n
            assert lhs == pytest.approx(rhs, rel=1e-10)


def test_expint_rejects_non_integer_order():
    with pytest.raises(DomainError):
        expint_en(1.5, 1.0)
    with pytest.raises(DomainError):
        expint_en(1, 0.0)


def test_scaled_expint_small_argument_is_direct_product():
    for n in (1, 2, 4):
        assert scaled_expint_en(n, 1.0) == pytest.approx(math.e * special.expn(n, 1.0), rel=1e-13)


def test_scaled_expint_asymptotic_branch_matches_direct_product():
    z = 500.5
    for n in (1, 3):
        assert scaled_expint_en(n, z) == pytest.approx(math.exp(z) * special.expn(n, z), rel=1e-9)


def test_scaled_expint_large_argument_does_not_overflow():
    z = 1e4
    value = scaled_expint_en(2, z)
    assert np.isfinite(value)
    assert value == pytest.approx((1.0 - 2.0 / z) / z, rel=1e-7)


def test_approx_e1_small_argument():
    z = 1e-3
    assert approx_e1(z) == pytest.approx(special.exp1(z), abs=1e-6)


def test_approx_en_series_matches_scipy():
    for n, z in [(2, 0.1), (3, 0.5), (4, 1.0)]:
        assert approx_en(n, z) == pytest.approx(special.expn(n, z), rel=1e-10)


def test_product_gamma_cdf_and_survival_are_complementary():
    for m in (0.5, 1.0, 3.0):
        for x in (0.05, 0.5, 1.0, 4.0, 20.0):
            assert cdf_product_gamma(m, x) + sf_product_gamma(m, x) == pytest.approx(1.0, abs=1e-12)


def test_product_gamma_cdf_rayleigh_closed_form():
    # product of two unit exponentials: 1 - 2√x K1(2√x)
    for x in (0.3, 2.0, 9.0):
        expected_sf = 2.0 * math.sqrt(x) * special.k1(2.0 * math.sqrt(x))
        assert sf_product_gamma(1.0, x) == pytest.approx(expected_sf, rel=1e-8)


def test_product_gamma_cdf_limits():
    assert cdf_product_gamma(3.0, 0.0) == 0.0
    assert cdf_product_gamma(3.0, np.inf) == 1.0
    assert sf_product_gamma(3.0, np.inf) == 0.0
    with pytest.raises(DomainError):
        cdf_product_gamma(3.0, -1.0)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(relative_tolerance=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=2.5)


def test_integrate_1d_semi_infinite():
    value, error = integrate_1d(lambda x: math.exp(-x), 0.0, np.inf)
    assert value == pytest.approx(1.0, rel=1e-10)
    assert error >= 0.0


def test_integrate_1d_empty_interval():
    assert integrate_1d(lambda x: 1.0, 2.0, 1.0) == (0.0, 0.0)


def test_integrate_1d_reports_divergence():
    with pytest.raises(QuadratureError) as info:
        integrate_1d(lambda x: 1.0 / x, 0.0, 1.0, QuadratureSpec(max_subdivisions=50))
    assert info.value.error_estimate > 0.0


def test_default_quadrature_tolerances():
    assert DEFAULT_QUAD.relative_tolerance == 1e-9
    assert DEFAULT_QUAD.max_subdivisions == 200

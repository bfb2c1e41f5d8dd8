"""
Special functions used by the outage and REIR expressions.

Incomplete gamma, K0 and E_n come from scipy.special. The only Meijer-G
instance needed (the CDF of a product of two unit-mean gamma variables) is
evaluated as a one-dimensional quadrature of its density.
"""

import logging
import math
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special
from scipy.integrate import IntegrationWarning

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from constants import (  # noqa: E402
    en_series_terms,
    euler_gamma,
    quad_abs_tol,
    quad_max_subdivisions,
    quad_rel_tol,
    scaled_en_asymptotic_terms,
    scaled_en_switch,
)

logger = logging.getLogger(__name__)


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, value, error_estimate):
        super().__init__(f"{message} (value={value:.6e}, error estimate={error_estimate:.3e})")
        self.value = value
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances shared by every integral evaluation."""

    relative_tolerance: float = quad_rel_tol
    absolute_tolerance: float = quad_abs_tol
    max_subdivisions: int = quad_max_subdivisions

    def __post_init__(self):
        if not self.relative_tolerance > 0 or not self.absolute_tolerance > 0:
            raise DomainError("Quadrature tolerances must be > 0.")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be a positive integer.")


DEFAULT_QUAD = QuadratureSpec()


def require(condition, message):
    """Raise DomainError with `message` unless `condition` holds."""
    if not condition:
        raise DomainError(message)


def _as_output(values, like):
    return float(values) if np.ndim(like) == 0 else values


def integrate_1d(func, lower, upper, quad=DEFAULT_QUAD, points=None, epsabs=None):
    """
    Adaptive Gauss-Kronrod integration with a convergence check.

    Parameters:
    -----------
    func : callable
        Scalar integrand.
    lower, upper : float
        Limits; `upper` may be np.inf.
    quad : QuadratureSpec
        Tolerances and subdivision limit.
    points : sequence or None
        Interior break points (finite intervals only).
    epsabs : float or None
        Absolute tolerance override (defaults to quad.absolute_tolerance).

    Returns:
    --------
    value, error_estimate : float
    """
    if upper <= lower:
        return 0.0, 0.0
    epsabs = quad.absolute_tolerance if epsabs is None else epsabs
    kwargs = dict(epsabs=epsabs, epsrel=quad.relative_tolerance, limit=int(quad.max_subdivisions))
    if points is not None and np.isfinite(upper):
        inner = [p for p in points if lower < p < upper]
        if inner:
            kwargs["points"] = inner
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, error, info, *rest = integrate.quad(func, lower, upper, full_output=1, **kwargs)
    if rest:
        # ier > 0: accept round-off complaints when the error estimate is still tight
        target = max(epsabs, quad.relative_tolerance * abs(value))
        if not np.isfinite(value) or error > 1e3 * target:
            raise QuadratureError(f"quad did not converge on [{lower}, {upper}]", value, error)
        logger.debug("quad warning on [%g, %g]: %s (err %.2e)", lower, upper, rest[0], error)
    return value, error


def lower_inc_gamma(a, x):
    """Lower incomplete gamma γ(a, x) = ∫₀ˣ t^{a-1} e^{-t} dt."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    require(np.all(a > 0), "lower_inc_gamma requires a > 0.")
    require(np.all(x >= 0), "lower_inc_gamma requires x >= 0.")
    out = special.gammainc(a, x) * special.gamma(a)
    return _as_output(out, out)


def upper_inc_gamma(a, x):
    """Upper incomplete gamma Γ(a, x) = ∫ₓ^∞ t^{a-1} e^{-t} dt."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    require(np.all(a > 0), "upper_inc_gamma requires a > 0.")
    require(np.all(x >= 0), "upper_inc_gamma requires x >= 0.")
    out = special.gammaincc(a, x) * special.gamma(a)
    return _as_output(out, out)


def bessel_k0(x):
    """Modified Bessel function of the second kind K₀(x), x > 0."""
    x = np.asarray(x, dtype=float)
    require(np.all(x > 0), "bessel_k0 requires x > 0 (K0 diverges at 0).")
    return _as_output(special.k0(x), x)


def expint_en(n, z):
    """Generalized exponential integral E_n(z) = ∫₁^∞ e^{-zt} t^{-n} dt."""
    z = np.asarray(z, dtype=float)
    require(int(n) == n and n >= 1, "expint_en requires an integer n >= 1.")
    require(np.all(z > 0), "expint_en requires z > 0.")
    return _as_output(special.expn(int(n), z), z)


def scaled_expint_en(n, z):
    """
    e^z E_n(z) without overflow.

    The direct product is used up to `constants.scaled_en_switch`; beyond it
    the asymptotic series (1/z) Σ_k (-1)^k (n)_k / z^k is summed.
    """
    require(int(n) == n and n >= 1, "scaled_expint_en requires an integer n >= 1.")
    z = float(z)
    require(z > 0, "scaled_expint_en requires z > 0.")
    if z <= scaled_en_switch:
        return math.exp(z) * float(special.expn(int(n), z))
    total = 0.0
    term = 1.0
    for k in range(scaled_en_asymptotic_terms):
        total += term
        term *= -(n + k) / z
    return total / z


def approx_e1(z):
    """Small-argument approximation E₁(z) ≈ -C_γ - ln(z) + z."""
    z = np.asarray(z, dtype=float)
    require(np.all(z > 0), "approx_e1 requires z > 0.")
    return _as_output(-euler_gamma - np.log(z) + z, z)


def approx_en(n, z, terms=en_series_terms):
    """
    Series approximation of E_n(z) for n >= 2, truncated after `terms` terms:

        E_n(z) ≈ (-z)^{n-1}/(n-1)! (ψ(n) - ln z) - Σ_{k=0, k≠n-1}^{terms-1} (-z)^k / (k! (1-n+k))
    """
    require(int(n) == n and n >= 2, "approx_en requires an integer n >= 2.")
    require(terms >= n, "approx_en needs at least n series terms.")
    z = float(z)
    require(z > 0, "approx_en requires z > 0.")
    n = int(n)
    head = (-z) ** (n - 1) / math.factorial(n - 1) * (special.psi(n) - math.log(z))
    tail = 0.0
    for k in range(terms):
        if k == n - 1:
            continue
        tail += (-z) ** k / (math.factorial(k) * (1 - n + k))
    return head - tail


def approx_lower_gamma(m, t):
    """Finite series γ(m, t) = (m-1)! - e^{-t} Σ_{k=0}^{m-1} (m-1)!/k! t^k for integer m."""
    require(int(m) == m and m >= 1, "approx_lower_gamma requires an integer m >= 1.")
    t = float(t)
    require(t >= 0, "approx_lower_gamma requires t >= 0.")
    m = int(m)
    fact = math.factorial(m - 1)
    series = sum(fact / math.factorial(k) * t**k for k in range(m))
    return fact - math.exp(-t) * series


def _product_gamma_log_norm(m):
    # log of 4 m^{2m} / Γ(m)², the density constant after z = u²
    return math.log(4.0) + 2.0 * m * math.log(m) - 2.0 * special.gammaln(m)


def _product_gamma_kernel(m, log_norm):
    def kernel(u):
        if u <= 0.0:
            return 0.0
        # K0(y) = k0e(y) e^{-y}
        arg = 2.0 * m * u
        return math.exp(log_norm + (2.0 * m - 1.0) * math.log(u) - arg) * special.k0e(arg)

    return kernel


# u = √z below which the CDF is integrated from 0 and above which the tail is used
_PIVOT_U = 1.0


def cdf_product_gamma(m, x, quad=DEFAULT_QUAD):
    """
    CDF of Z = X·Y with X, Y independent Gamma(m, rate m).

    Equals G^{2,1}_{1,3}(m² x | 1; m, m, 0)/Γ(m)². Computed as
    ∫₀ˣ (2m^{2m}/Γ(m)²) t^{m-1} K₀(2m√t) dt after the substitution t = u²,
    which removes the K₀ logarithmic singularity at the origin.

    Parameters:
    -----------
    m : float
        Gamma shape (> 0).
    x : float
        Argument (>= 0).
    quad : QuadratureSpec

    Returns:
    --------
    probability : float
    """
    require(m > 0, "cdf_product_gamma requires m > 0.")
    require(x >= 0, "cdf_product_gamma requires x >= 0.")
    if x == 0:
        return 0.0
    if not np.isfinite(x):
        return 1.0
    u = math.sqrt(x)
    if u > _PIVOT_U:
        return 1.0 - sf_product_gamma(m, x, quad)
    kernel = _product_gamma_kernel(m, _product_gamma_log_norm(m))
    value, _ = integrate_1d(kernel, 0.0, u, quad)
    return min(max(value, 0.0), 1.0)


def sf_product_gamma(m, x, quad=DEFAULT_QUAD):
    """Survival function 1 - cdf_product_gamma(m, x), integrated over the tail."""
    require(m > 0, "sf_product_gamma requires m > 0.")
    require(x >= 0, "sf_product_gamma requires x >= 0.")
    if not np.isfinite(x):
        return 0.0
    u = math.sqrt(x)
    if u <= _PIVOT_U:
        return 1.0 - cdf_product_gamma(m, x, quad)
    kernel = _product_gamma_kernel(m, _product_gamma_log_norm(m))
    # large-m mass sits just above u
    near, _ = integrate_1d(kernel, u, 2.0 * u, quad, epsabs=0.0)
    far, _ = integrate_1d(kernel, 2.0 * u, np.inf, quad)
    value = near + far
    return min(max(value, 0.0), 1.0)

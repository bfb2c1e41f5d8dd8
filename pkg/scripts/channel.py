"""
Small-scale fading (Nakagami-m power gains and their product) and the two
large-scale path-loss laws.
"""

import math
import os
import sys
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from constants import (  # noqa: E402
    alpha_c_default,
    alpha_r_default,
    c_light,
    d_reference,
    f_c_default,
    m_default,
    sigma_rcs_default,
)
from scripts.specfun import (  # noqa: E402
    DEFAULT_QUAD,
    cdf_product_gamma,
    require,
    sf_product_gamma,
)


@dataclass(frozen=True)
class FadingSpec:
    """Nakagami-m fading with unit mean power."""

    m: float = m_default

    def __post_init__(self):
        require(np.isfinite(self.m) and self.m >= 0.5, f"Nakagami shape m must be >= 0.5 (got {self.m}).")

    @property
    def mean_power(self):
        return 1.0


@dataclass(frozen=True)
class PathLossParams:
    """Exponents, carrier and radar cross section of both path-loss laws."""

    alpha_c: float = alpha_c_default
    alpha_r: float = alpha_r_default
    f_c: float = f_c_default
    sigma_rcs: float = sigma_rcs_default

    def __post_init__(self):
        require(self.alpha_c > 0 and self.alpha_r > 0, "Path-loss exponents must be > 0.")
        require(self.f_c > 0, "Carrier frequency f_c must be > 0.")
        require(self.sigma_rcs > 0, "Radar cross section sigma_rcs must be > 0.")

    @property
    def wavelength(self):
        return c_light / self.f_c

    @property
    def c_c(self):
        """Communication intercept C_c = (c / (4π f_c))²."""
        return (c_light / (4.0 * math.pi * self.f_c)) ** 2

    @property
    def c_r(self):
        """Radar intercept C_r = σ_RCS λ² / (4π)³."""
        return self.sigma_rcs * self.wavelength**2 / (4.0 * math.pi) ** 3


def sample_power_gain(spec, rng, size=None):
    """
    Draw |h|² ~ Gamma(shape m, rate m) (unit mean).

    Parameters:
    -----------
    spec : FadingSpec
    rng : numpy.random.Generator
    size : int, tuple or None

    Returns:
    --------
    gain : float or ndarray
    """
    return rng.gamma(shape=spec.m, scale=1.0 / spec.m, size=size)


def pdf_power_gain(m, x):
    """Density (m^m/Γ(m)) x^{m-1} e^{-mx}."""
    x = np.asarray(x, dtype=float)
    require(m > 0, "pdf_power_gain requires m > 0.")
    require(np.all(x >= 0), "pdf_power_gain requires x >= 0.")
    out = stats.gamma.pdf(x, a=m, scale=1.0 / m)
    return float(out) if out.ndim == 0 else out


def cdf_power_gain(m, x):
    """CDF γ(m, mx)/Γ(m)."""
    x = np.asarray(x, dtype=float)
    require(m > 0, "cdf_power_gain requires m > 0.")
    require(np.all(x >= 0), "cdf_power_gain requires x >= 0.")
    # regularized γ(m, mx)/Γ(m), finite for x = inf as well
    out = special.gammainc(m, m * x)
    return float(out) if out.ndim == 0 else out


def pdf_equivalent(m, z):
    """Density of |h_{r,d}|²|h_{r,u}|²: (2m^{2m}/Γ(m)²) z^{m-1} K₀(2m√z), z > 0."""
    z = np.asarray(z, dtype=float)
    require(m > 0, "pdf_equivalent requires m > 0.")
    require(np.all(z > 0), "pdf_equivalent requires z > 0.")
    log_norm = math.log(2.0) + 2.0 * m * math.log(m) - 2.0 * special.gammaln(m)
    arg = 2.0 * m * np.sqrt(z)
    out = np.exp(log_norm + (m - 1.0) * np.log(z) - arg) * special.k0e(arg)
    return float(out) if np.ndim(out) == 0 else out


def cdf_equivalent(m, z, quad=DEFAULT_QUAD):
    """CDF of the equivalent radar channel gain."""
    return cdf_product_gamma(m, z, quad)


def sf_equivalent(m, z, quad=DEFAULT_QUAD):
    """Survival function of the equivalent radar channel gain."""
    return sf_product_gamma(m, z, quad)


def path_loss_comm(d, p):
    """Communication path gain C_c d^{-α_c} for d >= 1 m."""
    d = np.asarray(d, dtype=float)
    require(np.all(d >= d_reference), f"Distance must be >= the {d_reference} m reference distance.")
    out = p.c_c * d ** (-p.alpha_c)
    return float(out) if out.ndim == 0 else out


def path_loss_radar(d, p):
    """Radar round-trip path gain C_r d^{-α_r} for d >= 1 m."""
    d = np.asarray(d, dtype=float)
    require(np.all(d >= d_reference), f"Distance must be >= the {d_reference} m reference distance.")
    out = p.c_r * d ** (-p.alpha_r)
    return float(out) if out.ndim == 0 else out

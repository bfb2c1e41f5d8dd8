"""
Closed-form and semi-analytical evaluators.

Outage probabilities of both uplink users (finite-series closed forms for
integer m, single-integral forms for any m), the instantaneous and ergodic
radar estimation information rate (REIR), and the high-SNR slopes of both
(outage diversity order and REIR slope).

The finite double sums are evaluated term by term in the log domain
(scipy.special.xlogy/gammaln), so operating points with P_c ~ 1e5 W and
path gains ~ 1e-11 neither overflow nor lose the zero powers (0^0 = 1).
The closed forms still return 1 - Σ, which carries an absolute error of a
few 1e-16: relative accuracy degrades below an outage of about 1e-9 and
the result reads 0 below about 1e-16. Deeper points need the integral
forms (method="integral"). At the default deployment the fig1 grid stays
above 1e-10.
"""

import logging
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize, special

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from constants import probability_slack  # noqa: E402
from scripts.channel import cdf_power_gain, pdf_power_gain  # noqa: E402
from scripts.linkbudget import derive_constants, echo_gain  # noqa: E402
from scripts.specfun import (  # noqa: E402
    DEFAULT_QUAD,
    integrate_1d,
    scaled_expint_en,
    sf_product_gamma,
)

logger = logging.getLogger(__name__)

CLOSED_FORM = "closed_form"
SEMI_INTEGRAL = "semi_integral"
REIR_QUADRATURE = "quadrature"
REIR_INTEGER_M = "integer_m"
REIR_RAYLEIGH = "rayleigh_closed"
REIR_MONTE_CARLO = "monte_carlo"


class PreconditionError(ValueError):
    """An evaluator was called outside the parameter range it is valid for."""


class ProbabilityRangeError(ArithmeticError):
    """A closed-form probability left [0, 1] by more than the allowed slack."""


@dataclass(frozen=True)
class OutageResult:
    probability: float
    method: str
    error_estimate: float = 0.0


@dataclass(frozen=True)
class ReirResult:
    rate: float  # bits/s
    method: str
    error_estimate: float = 0.0


def _clamp_probability(value, label):
    if not (-probability_slack <= value <= 1.0 + probability_slack):
        raise ProbabilityRangeError(f"{label} evaluated to {value!r}, outside [0, 1].")
    return min(max(value, 0.0), 1.0)


def is_integer_m(m):
    return float(m).is_integer() and m >= 1


def _require_integer_m(cfg, label):
    if not is_integer_m(cfg.m):
        raise PreconditionError(f"{label} needs an integer Nakagami m >= 1 (got m={cfg.m}).")


def _sic_precondition(cfg):
    if cfg.gamma_sic > cfg.gamma_th:
        raise PreconditionError(
            f"gamma_sic={cfg.gamma_sic} exceeds gamma_th={cfg.gamma_th}; the joint event does not factor."
        )


# ---------------------------------------------------------------------------
# Outage of the communication transmitter (decoded first)
# ---------------------------------------------------------------------------


def outage_comm_tx_closed(k, cfg):
    """
    Finite-series outage of the communication transmitter.

    1 - exp(-mγ(a1+a2)/P_c) Σ_{p<m} Σ_{r<=p} m^r γ^p C(p,r) (P_r a3)^{p-r} (a1+a2)^r Γ(m+p-r)
        / ((m-1)! p! P_c^p (γ a3 P_r/P_c + 1)^{m+p-r})

    Parameters:
    -----------
    k : DerivedConstants
    cfg : SystemConfig
        Must have an integer Nakagami m.

    Returns:
    --------
    result : OutageResult
    """
    _require_integer_m(cfg, "outage_comm_tx_closed")
    gamma = cfg.gamma_th
    if not math.isfinite(gamma):
        return OutageResult(1.0, CLOSED_FORM)
    m = int(cfg.m)
    lam_const = (k.a1 + k.a2) / cfg.p_c
    lam_slope = k.a3 * cfg.p_r / cfg.p_c
    head = -m * gamma * lam_const
    tail = math.log1p(gamma * lam_slope)
    total = 0.0
    for p in range(m):
        for r in range(p + 1):
            log_term = (
                head
                + r * math.log(m)
                + special.xlogy(p, gamma)
                + math.log(math.comb(p, r))
                + special.xlogy(p - r, lam_slope)
                + special.xlogy(r, lam_const)
                + special.gammaln(m + p - r)
                - special.gammaln(m)
                - special.gammaln(p + 1)
                - (m + p - r) * tail
            )
            total += math.exp(log_term)
    return OutageResult(_clamp_probability(1.0 - total, "outage_comm_tx_closed"), CLOSED_FORM)


def outage_comm_tx_integral(k, cfg, quad=DEFAULT_QUAD):
    """∫₀^∞ γ(m, mΛ(x))/Γ(m) f_{|h_r|²}(x) dx with Λ(x) = γ_th(a3 P_r x + a1 + a2)/P_c (any m > 0)."""
    gamma = cfg.gamma_th
    if not math.isfinite(gamma):
        return OutageResult(1.0, SEMI_INTEGRAL)
    m = cfg.m
    lam_const = gamma * (k.a1 + k.a2) / cfg.p_c
    lam_slope = gamma * k.a3 * cfg.p_r / cfg.p_c
    if lam_slope == 0.0:
        return OutageResult(float(special.gammainc(m, m * lam_const)), SEMI_INTEGRAL)

    def integrand(x):
        return special.gammainc(m, m * (lam_slope * x + lam_const)) * pdf_power_gain(m, x)

    # split at the unit mean so a small-m density spike at 0 sits at an endpoint
    head, head_err = integrate_1d(integrand, 0.0, 1.0, quad, epsabs=0.0)
    tail, tail_err = integrate_1d(integrand, 1.0, np.inf, quad, epsabs=0.0)
    return OutageResult(_clamp_probability(head + tail, "outage_comm_tx_integral"), SEMI_INTEGRAL,
                        head_err + tail_err)


# ---------------------------------------------------------------------------
# Outage of the radar target's uplink (joint SIC + own decoding event)
# ---------------------------------------------------------------------------


def _radar_decoding_floor(k, cfg):
    """Smallest |h_r|² for which the radar target's own SINR clears γ_th."""
    if cfg.p_r == 0.0:
        return math.inf
    return cfg.gamma_th * (k.a4 + k.a5) / cfg.p_r


def outage_radar_comm_closed(k, cfg):
    """
    Finite-series outage of the radar target's uplink.

    Success requires the near user to clear γ_SIC and the radar target to
    clear γ_th on the same realization; with mean interference the second
    event depends on |h_r|² alone, which gives the upper incomplete gamma
    Γ(r+m, m x0 (1 + γ_SIC a3 P_r/P_c)) with x0 = γ_th(a4+a5)/P_r.
    """
    _require_integer_m(cfg, "outage_radar_comm_closed")
    _sic_precondition(cfg)
    x0 = _radar_decoding_floor(k, cfg)
    if not math.isfinite(x0):
        return OutageResult(1.0, CLOSED_FORM)
    m = int(cfg.m)
    gamma_s = cfg.gamma_sic
    lam_const = (k.a1 + k.a2) / cfg.p_c
    lam_slope = k.a3 * cfg.p_r / cfg.p_c
    tilt = math.log1p(gamma_s * lam_slope)
    y = m * x0 * (1.0 + gamma_s * lam_slope)
    total = 0.0
    for p in range(m):
        for r in range(p + 1):
            upper = special.gammaincc(r + m, y)
            if upper == 0.0:
                continue
            log_term = (
                math.log(math.comb(p, r))
                + special.xlogy(p, gamma_s)
                + (p - r) * math.log(m)
                + special.xlogy(p - r, lam_const)
                + special.xlogy(r, lam_slope)
                - special.gammaln(m)
                - special.gammaln(p + 1)
                - m * gamma_s * lam_const
                - (r + m) * tilt
                + special.gammaln(r + m)
                + math.log(upper)
            )
            total += math.exp(log_term)
    return OutageResult(_clamp_probability(1.0 - total, "outage_radar_comm_closed"), CLOSED_FORM)


def outage_radar_comm_integral(k, cfg, quad=DEFAULT_QUAD):
    """
    Pr{|h_r|² < x0} + ∫_{x0}^∞ γ(m, mγ_SIC(a3 P_r x + a1 + a2)/P_c)/Γ(m) f_{|h_r|²}(x) dx.

    This is one minus the success integral over [x0, ∞), rearranged so that
    outage probabilities near 0 keep their relative precision.
    """
    _sic_precondition(cfg)
    x0 = _radar_decoding_floor(k, cfg)
    if not math.isfinite(x0):
        return OutageResult(1.0, SEMI_INTEGRAL)
    m = cfg.m
    lam_const = cfg.gamma_sic * (k.a1 + k.a2) / cfg.p_c
    lam_slope = cfg.gamma_sic * k.a3 * cfg.p_r / cfg.p_c

    def integrand(x):
        return special.gammainc(m, m * (lam_slope * x + lam_const)) * pdf_power_gain(m, x)

    floor = cdf_power_gain(m, x0)
    pivot = max(x0, 1.0)
    head, head_err = integrate_1d(integrand, x0, pivot, quad, epsabs=0.0)
    tail, tail_err = integrate_1d(integrand, pivot, np.inf, quad, epsabs=0.0)
    return OutageResult(_clamp_probability(floor + head + tail, "outage_radar_comm_integral"),
                        SEMI_INTEGRAL, head_err + tail_err)


def outage_comm_tx(cfg, method="closed", quad=DEFAULT_QUAD):
    """Outage of the communication transmitter; non-integer m always takes the integral path."""
    k = derive_constants(cfg)
    if method == "closed" and is_integer_m(cfg.m):
        return outage_comm_tx_closed(k, cfg)
    if method == "closed":
        logger.info("m=%g is not an integer; using the integral form for outage_comm_tx", cfg.m)
    elif method != "integral":
        raise ValueError(f"Unknown outage method: {method!r}")
    return outage_comm_tx_integral(k, cfg, quad)


def outage_radar_comm(cfg, method="closed", quad=DEFAULT_QUAD):
    """Outage of the radar target's uplink; non-integer m always takes the integral path."""
    k = derive_constants(cfg)
    if method == "closed" and is_integer_m(cfg.m):
        return outage_radar_comm_closed(k, cfg)
    if method == "closed":
        logger.info("m=%g is not an integer; using the integral form for outage_radar_comm", cfg.m)
    elif method != "integral":
        raise ValueError(f"Unknown outage method: {method!r}")
    return outage_radar_comm_integral(k, cfg, quad)


def outage_noma_baseline(cfg, method="closed", quad=DEFAULT_QUAD):
    """Both outage metrics of the same deployment run as plain NOMA (no shared radar band)."""
    plain = replace(cfg, beta_semi=0.0)
    return {
        "outage_comm_tx": outage_comm_tx(plain, method, quad),
        "outage_radar_comm": outage_radar_comm(plain, method, quad),
    }


# ---------------------------------------------------------------------------
# Radar estimation information rate
# ---------------------------------------------------------------------------


def _rate_prefactor(cfg):
    """δ/(2T ln 2): converts E[ln(1 + a Z)] into bits/s."""
    return cfg.delta_duty / (2.0 * cfg.t_pulse * math.log(2.0))


def reir_instant(echo_snr, cfg):
    """
    Upper bound (δ/2T) log₂(1 + 2 T β B γ_echo) on the radar estimation rate, in bits/s.

    Accepts a scalar or an array of echo SNRs.
    """
    snr = np.asarray(echo_snr, dtype=float)
    rate = _rate_prefactor(cfg) * np.log1p(2.0 * cfg.t_pulse * cfg.beta_semi * cfg.bandwidth_b * snr)
    return float(rate) if rate.ndim == 0 else rate


def _survival_cutoff(m, tol, quad):
    """Smallest y with Pr{Z > y} = tol, by doubling a bracket then Brent's method."""
    lower, upper = 0.0, 1.0
    for _ in range(200):
        if sf_product_gamma(m, upper, quad) <= tol:
            break
        lower, upper = upper, 2.0 * upper
    else:
        raise RuntimeError(f"Survival function of the product gain never fell below {tol:g}.")
    return optimize.brentq(lambda y: sf_product_gamma(m, y, quad) - tol, lower, upper, xtol=1e-10 * upper)


def ergodic_reir_quadrature(cfg, quad=DEFAULT_QUAD):
    """
    Ergodic REIR from the survival function of the equivalent radar gain:

        R = (δ/(2T ln2)) ∫₀^∞ Pr{Z > z/a} / (1 + z) dz,   a = Ξ_{r,1} d_r^{-α_r}

    Evaluated as a ∫₀^{y*} S(y)/(1 + a y) dy with y* the point where S drops
    below the absolute tolerance. The integrand is scaled by (1 + a)/a so the
    integral stays O(1) to O(ln a), and for a > 1 the stretch beyond 1/a is
    integrated in log y.
    """
    a = echo_gain(derive_constants(cfg), cfg)
    if a == 0.0:
        return ReirResult(0.0, REIR_QUADRATURE)
    m = cfg.m
    y_star = _survival_cutoff(m, quad.absolute_tolerance, quad)
    scale = 1.0 + a

    def integrand(y):
        return scale * sf_product_gamma(m, y, quad) / (1.0 + a * y)

    knee = 1.0 / a
    if a <= 1.0 or knee >= y_star:
        value, error = integrate_1d(integrand, 0.0, y_star, quad)
    else:
        near, near_err = integrate_1d(integrand, 0.0, knee, quad)
        far, far_err = integrate_1d(lambda s: integrand(math.exp(s)) * math.exp(s),
                                    math.log(knee), math.log(y_star), quad)
        value, error = near + far, near_err + far_err
    norm = a / scale
    return ReirResult(_rate_prefactor(cfg) * norm * value, REIR_QUADRATURE,
                      _rate_prefactor(cfg) * norm * error)


def ergodic_reir_integer_m(cfg, quad=DEFAULT_QUAD):
    """
    Ergodic REIR for integer m via the exponential-integral kernel.

    Conditioned on |h_{r,u}|² = x, E[ln(1 + a x Y)] = Σ_{k<m} e^{z} E_{k+1}(z)
    with z = m/(a x); the remaining expectation over x is one outer integral.
    """
    if not is_integer_m(cfg.m):
        raise PreconditionError(f"ergodic_reir_integer_m needs an integer m >= 1 (got m={cfg.m}).")
    a = echo_gain(derive_constants(cfg), cfg)
    if a == 0.0:
        return ReirResult(0.0, REIR_INTEGER_M)
    m = int(cfg.m)
    scale = (1.0 + a) / a

    def integrand(x):
        if x <= 0.0:
            return 0.0
        z = m / (a * x)
        kernel = sum(scaled_expint_en(n, z) for n in range(1, m + 1))
        return scale * kernel * pdf_power_gain(m, x)

    head, head_err = integrate_1d(integrand, 0.0, 1.0, quad)
    tail, tail_err = integrate_1d(integrand, 1.0, np.inf, quad)
    return ReirResult(_rate_prefactor(cfg) * (head + tail) / scale, REIR_INTEGER_M,
                      _rate_prefactor(cfg) * (head_err + tail_err) / scale)


def ergodic_reir_rayleigh(cfg, quad=DEFAULT_QUAD):
    """Ergodic REIR for m = 1: ∫₀^∞ ln(1 + a u²) 4u K₀(2u) du with Z = u² a product of unit exponentials."""
    if cfg.m != 1:
        raise PreconditionError(f"ergodic_reir_rayleigh needs m = 1 (got m={cfg.m}).")
    a = echo_gain(derive_constants(cfg), cfg)
    if a == 0.0:
        return ReirResult(0.0, REIR_RAYLEIGH)
    scale = (1.0 + a) / a

    def integrand(u):
        if u <= 0.0:
            return 0.0
        return scale * math.log1p(a * u * u) * 4.0 * u * special.k0(2.0 * u)

    # K₀(2u) has decayed by e^{-16} at the pivot
    pivot = 8.0
    head, head_err = integrate_1d(integrand, 0.0, pivot, quad, points=[1.0 / math.sqrt(a)])
    tail, tail_err = integrate_1d(integrand, pivot, np.inf, quad)
    return ReirResult(_rate_prefactor(cfg) * (head + tail) / scale, REIR_RAYLEIGH,
                      _rate_prefactor(cfg) * (head_err + tail_err) / scale)


def ergodic_reir(cfg, method="closed", quad=DEFAULT_QUAD):
    """
    Route an ergodic REIR request.

    'integral' is the survival-function quadrature; 'closed' takes the
    Rayleigh form for m = 1, the exponential-integral form for other integer
    m and falls back to the quadrature otherwise.
    """
    if method == "integral":
        return ergodic_reir_quadrature(cfg, quad)
    if method != "closed":
        raise ValueError(f"Unknown REIR method: {method!r}")
    if cfg.m == 1:
        return ergodic_reir_rayleigh(cfg, quad)
    if is_integer_m(cfg.m):
        return ergodic_reir_integer_m(cfg, quad)
    logger.info("m=%g is not an integer; using the quadrature form for ergodic REIR", cfg.m)
    return ergodic_reir_quadrature(cfg, quad)


def diversity_slope(cfg, p_bs_grid, method="integral", quad=DEFAULT_QUAD):
    """
    High-SNR slope of the ergodic REIR against log₂(P_BS).

    Parameters:
    -----------
    cfg : SystemConfig
    p_bs_grid : array-like
        Ascending BS radar powers (W) spanning at least three decades.
    method : str
        'integral' or 'closed', as in ergodic_reir.

    Returns:
    --------
    slope : float
        Least-squares slope over the top decade of the grid (bits/s per log₂ unit).
    """
    grid = np.asarray(p_bs_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise PreconditionError("p_bs_grid must be a strictly ascending list of positive powers.")
    # relative slack keeps dB-generated grids from losing an endpoint to rounding
    slack = 1.0 - 1e-9
    if grid[-1] / grid[0] < 1e3 * slack:
        raise PreconditionError("p_bs_grid must span at least three decades.")
    top = grid[grid >= grid[-1] / 10.0 * slack]
    if top.size < 2:
        raise PreconditionError("p_bs_grid needs at least two points in its top decade.")
    rates = [ergodic_reir(replace(cfg, p_bs=float(p)), method, quad).rate for p in top]
    slope, _ = np.polyfit(np.log2(top), rates, 1)
    logger.debug("diversity slope over %d points: %.6g", top.size, slope)
    return float(slope)


_OUTAGE_METRICS = {
    "outage_comm_tx": outage_comm_tx,
    "outage_radar_comm": outage_radar_comm,
}


def outage_diversity_order(cfg, p_c_grid, metric="outage_comm_tx", method="integral", quad=DEFAULT_QUAD):
    """
    High-SNR diversity order of an outage probability against P_c.

    Least-squares slope of -log P_out against log P_c over the top decade of
    the grid, with P_r and P_BS held at their configured values. The near
    user reaches m; the radar target's outage settles on its own decoding
    floor, so its order tends to 0.

    Parameters:
    -----------
    cfg : SystemConfig
    p_c_grid : array-like
        Ascending near-user powers (W); at least two points in the top decade.
    metric : str
        'outage_comm_tx' or 'outage_radar_comm'.
    method : str
        'integral' (default, keeps relative accuracy in deep outage) or 'closed'.

    Returns:
    --------
    order : float
    """
    if metric not in _OUTAGE_METRICS:
        raise ValueError(f"Unknown outage metric: {metric!r}")
    grid = np.asarray(p_c_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise PreconditionError("p_c_grid must be a strictly ascending list of positive powers.")
    top = grid[grid >= grid[-1] / 10.0 * (1.0 - 1e-9)]
    if top.size < 2:
        raise PreconditionError("p_c_grid needs at least two points in its top decade.")
    evaluate = _OUTAGE_METRICS[metric]
    probs = np.array([evaluate(replace(cfg, p_c=float(p)), method, quad).probability for p in top])
    if np.any(probs <= 0.0):
        raise PreconditionError(f"{metric} reached 0 on the top decade; the order is not measurable there.")
    order, _ = np.polyfit(np.log(top), -np.log(probs), 1)
    logger.debug("%s diversity order over %d points: %.6g", metric, top.size, order)
    return float(order)

"""
System configuration, derived constants and the instantaneous SINR/SNR
expressions of the NOMA Semi-ISaC uplink.

Gains G_c and G_r multiply every communication path gain and the radar
round-trip gain respectively, so the constants a1..a5 and the SINRs stay
consistent for any value (both default to 1).
"""

import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from enum import Enum

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from constants import (  # noqa: E402
    bandwidth_default,
    beta_semi_default,
    d_c_default,
    d_r_default,
    delta_duty_default,
    g_c_default,
    g_r_default,
    gamma_sic_default,
    gamma_sq,
    gamma_th_default,
    k_B,
    rho_bs_db_default,
    rho_c_db_default,
    rho_r_db_default,
    sigma_tau_default,
    t_pulse_default,
    t_temp_default,
)
from scripts.channel import FadingSpec, PathLossParams, path_loss_comm, path_loss_radar  # noqa: E402
from scripts.specfun import require  # noqa: E402


class ConfigError(ValueError):
    """Invalid or unparsable system configuration."""


class InterferenceMode(str, Enum):
    INSTANTANEOUS = "instantaneous"
    MEAN = "mean"


def noise_power(b_hz, t_temp):
    """Thermal noise σ² = k_B T_temp B (W)."""
    require(b_hz > 0, "Bandwidth must be > 0.")
    require(t_temp >= 0, "Temperature must be >= 0 K.")
    return k_B * t_temp * b_hz


def time_delay_energy(beta_semi, b_hz, sigma_tau):
    """Residual echo energy E_TD = γ² β² B² σ_τ² for a flat spectral shape."""
    return gamma_sq * beta_semi**2 * b_hz**2 * sigma_tau**2


def power_from_snr_db(rho_db, sigma2):
    """Transmit power (W) for a transmit SNR ρ = P/σ² given in dB."""
    return sigma2 * 10.0 ** (rho_db / 10.0)


_DEFAULT_SIGMA2 = noise_power(bandwidth_default, t_temp_default)


@dataclass(frozen=True)
class SystemConfig:
    """All physical and protocol parameters of one deployment (SI units)."""

    p_c: float = power_from_snr_db(rho_c_db_default, _DEFAULT_SIGMA2)
    p_r: float = power_from_snr_db(rho_r_db_default, _DEFAULT_SIGMA2)
    p_bs: float = power_from_snr_db(rho_bs_db_default, _DEFAULT_SIGMA2)
    d_c: float = d_c_default
    d_r: float = d_r_default
    beta_semi: float = beta_semi_default
    bandwidth_b: float = bandwidth_default
    t_temp: float = t_temp_default
    sigma_tau: float = sigma_tau_default
    gamma_th: float = gamma_th_default
    gamma_sic: float = gamma_sic_default
    delta_duty: float = delta_duty_default
    t_pulse: float = t_pulse_default
    g_c: float = g_c_default
    g_r: float = g_r_default
    fading: FadingSpec = field(default_factory=FadingSpec)
    pathloss: PathLossParams = field(default_factory=PathLossParams)

    def __post_init__(self):
        checks = [
            (self.p_c > 0, "p_c must be > 0"),
            (self.p_r >= 0, "p_r must be >= 0"),
            (self.p_bs >= 0, "p_bs must be >= 0"),
            (self.d_c >= 1 and self.d_r >= 1, "distances must be >= 1 m"),
            (0 <= self.beta_semi <= 1, "beta_semi must lie in [0, 1]"),
            (self.bandwidth_b > 0, "bandwidth_b must be > 0"),
            (self.t_temp > 0, "t_temp must be > 0"),
            (self.sigma_tau >= 0, "sigma_tau must be >= 0"),
            (self.gamma_th >= 0 and self.gamma_sic >= 0, "thresholds must be >= 0"),
            (self.gamma_sic <= self.gamma_th, "gamma_sic must not exceed gamma_th"),
            (0 < self.delta_duty <= 1, "delta_duty must lie in (0, 1]"),
            (self.t_pulse > 0, "t_pulse must be > 0"),
            (self.g_c > 0 and self.g_r > 0, "g_c and g_r must be > 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(f"Invalid SystemConfig: {message}.")
        for f in fields(self):
            value = getattr(self, f.name)
            # gamma_th = inf is the "never decodable" limit
            if isinstance(value, float) and not math.isfinite(value) and f.name != "gamma_th":
                raise ConfigError(f"Invalid SystemConfig: {f.name} must be finite.")

    @property
    def m(self):
        return self.fading.m

    @property
    def sigma2(self):
        return noise_power(self.bandwidth_b, self.t_temp)

    @classmethod
    def from_transmit_snr(cls, rho_c_db=rho_c_db_default, rho_r_db=rho_r_db_default,
                          rho_bs_db=rho_bs_db_default, **kwargs):
        """Build a config whose powers are given as transmit SNRs in dB."""
        sigma2 = noise_power(kwargs.get("bandwidth_b", bandwidth_default), kwargs.get("t_temp", t_temp_default))
        return cls(
            p_c=power_from_snr_db(rho_c_db, sigma2),
            p_r=power_from_snr_db(rho_r_db, sigma2),
            p_bs=power_from_snr_db(rho_bs_db, sigma2),
            **kwargs,
        )

    def transmit_snr_db(self, which):
        """Transmit SNR of 'c', 'r' or 'bs' in dB."""
        power = {"c": self.p_c, "r": self.p_r, "bs": self.p_bs}[which]
        return 10.0 * math.log10(power / self.sigma2) if power > 0 else -math.inf

    def with_transmit_snr(self, which, rho_db):
        """Copy with one transmit power reset from a transmit SNR in dB."""
        name = {"c": "p_c", "r": "p_r", "bs": "p_bs"}[which]
        return replace(self, **{name: power_from_snr_db(rho_db, self.sigma2)})


@dataclass(frozen=True)
class DerivedConstants:
    """Algebraic constants of the closed forms, computed once per config."""

    c_c: float
    c_r: float
    sigma2: float
    gamma2: float
    e_td: float
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    xi_r1: float


@dataclass(frozen=True)
class ChannelRealization:
    """One joint draw (or arrays of draws) of the four small-scale power gains."""

    g_c_link: np.ndarray
    g_r_link: np.ndarray
    g_rd: np.ndarray
    g_ru: np.ndarray

    def __post_init__(self):
        for name in ("g_c_link", "g_r_link", "g_rd", "g_ru"):
            require(np.all(np.asarray(getattr(self, name)) >= 0), f"{name} must be >= 0.")


def _comm_gain(cfg, d):
    return cfg.g_c * path_loss_comm(d, cfg.pathloss)


def _radar_gain(cfg):
    return cfg.g_r * path_loss_radar(cfg.d_r, cfg.pathloss)


def derive_constants(cfg):
    """
    Compute a1..a5, E_TD, σ² and Ξ_{r,1} for a configuration.

    a1 = P_BS G_r C_r d_r^{-α_r} E_TD / (G_c C_c d_c^{-α_c})
    a2 = σ² / (G_c C_c d_c^{-α_c})
    a3 = d_r^{-α_c} / d_c^{-α_c}
    a4, a5 as a1, a2 with d_c -> d_r in the denominator
    Ξ_{r,1} = 2 T β B P_BS G_r C_r E_TD / σ²
    """
    sigma2 = cfg.sigma2
    e_td = time_delay_energy(cfg.beta_semi, cfg.bandwidth_b, cfg.sigma_tau)
    interference = mean_radar_interference(cfg)
    gain_dc = _comm_gain(cfg, cfg.d_c)
    gain_dr = _comm_gain(cfg, cfg.d_r)
    alpha_c = cfg.pathloss.alpha_c
    return DerivedConstants(
        c_c=cfg.pathloss.c_c,
        c_r=cfg.pathloss.c_r,
        sigma2=sigma2,
        gamma2=gamma_sq,
        e_td=e_td,
        a1=interference / gain_dc,
        a2=sigma2 / gain_dc,
        a3=cfg.d_r ** (-alpha_c) / cfg.d_c ** (-alpha_c),
        a4=interference / gain_dr,
        a5=sigma2 / gain_dr,
        xi_r1=(2.0 * cfg.t_pulse * cfg.beta_semi * cfg.bandwidth_b * cfg.p_bs * cfg.g_r
               * cfg.pathloss.c_r * e_td / sigma2),
    )


def echo_gain(k, cfg):
    """Ξ_{r,1} d_r^{-α_r}: the factor multiplying |h_{r,eq}|² inside the REIR logarithm."""
    return k.xi_r1 * cfg.d_r ** (-cfg.pathloss.alpha_r)


def mean_radar_interference(cfg):
    """E[I_R] = P_BS G_r ℙ_r(d_r) E_TD (unit-mean fading integrates out)."""
    return cfg.p_bs * _radar_gain(cfg) * time_delay_energy(cfg.beta_semi, cfg.bandwidth_b, cfg.sigma_tau)


def radar_interference(r, cfg):
    """Instantaneous I_R = P_BS G_r ℙ_r(d_r) g_rd g_ru E_TD."""
    return mean_radar_interference(cfg) * np.asarray(r.g_rd) * np.asarray(r.g_ru)


def radar_interference_variance(cfg):
    """Var[I_R] = E[I_R]² ((1 + 1/m)² - 1) for independent Gamma(m, m) gains."""
    return mean_radar_interference(cfg) ** 2 * ((1.0 + 1.0 / cfg.m) ** 2 - 1.0)


def _interference(r, cfg, interference_mode):
    mode = InterferenceMode(interference_mode)
    if mode is InterferenceMode.MEAN:
        return mean_radar_interference(cfg)
    return radar_interference(r, cfg)


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def sinr_comm_tx(r, cfg, interference_mode):
    """SINR of the near communication transmitter, decoded first."""
    signal = cfg.p_c * _comm_gain(cfg, cfg.d_c) * np.asarray(r.g_c_link)
    denominator = (cfg.p_r * _comm_gain(cfg, cfg.d_r) * np.asarray(r.g_r_link)
                   + _interference(r, cfg, interference_mode) + cfg.sigma2)
    return _scalar_or_array(signal / denominator)


def sinr_radar_comm(r, cfg, interference_mode):
    """SINR of the radar target's uplink after the near user is cancelled."""
    signal = cfg.p_r * _comm_gain(cfg, cfg.d_r) * np.asarray(r.g_r_link)
    denominator = _interference(r, cfg, interference_mode) + cfg.sigma2
    return _scalar_or_array(signal / denominator)


def snr_radar_echo(r, cfg):
    """Echo SNR after every communication signal is cancelled."""
    return _scalar_or_array(radar_interference(r, cfg) / cfg.sigma2)

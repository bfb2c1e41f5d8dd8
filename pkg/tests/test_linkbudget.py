"""System configuration, derived constants and instantaneous SINRs."""

import math
from dataclasses import replace

import numpy as np
import pytest

from constants import gamma_sq, k_B
from scripts.channel import FadingSpec, PathLossParams, path_loss_comm, path_loss_radar
from scripts.linkbudget import (
    ChannelRealization,
    ConfigError,
    InterferenceMode,
    SystemConfig,
    derive_constants,
    echo_gain,
    mean_radar_interference,
    noise_power,
    power_from_snr_db,
    radar_interference,
    radar_interference_variance,
    sinr_comm_tx,
    sinr_radar_comm,
    snr_radar_echo,
    time_delay_energy,
)
from scripts.specfun import DomainError


def _realization(g_c=1.0, g_r=1.0, g_rd=1.0, g_ru=1.0):
    return ChannelRealization(g_c, g_r, g_rd, g_ru)


def _random_realization(rng, m, n):
    return ChannelRealization(*rng.gamma(m, 1.0 / m, size=(4, n)))


def test_noise_power():
    assert noise_power(1e7, 724.0) == pytest.approx(k_B * 724.0 * 1e7, rel=1e-15)
    assert noise_power(1e7, 0.0) == 0.0
    with pytest.raises(DomainError):
        noise_power(0.0, 300.0)


def test_time_delay_energy():
    assert gamma_sq == pytest.approx(3.289868, rel=1e-6)
    assert time_delay_energy(0.0, 1e7, 1e-8) == 0.0
    assert time_delay_energy(1.0, 1e7, 1e-8) == pytest.approx(0.0328987, rel=1e-5)


def test_system_config_validation():
    with pytest.raises(ConfigError):
        SystemConfig(beta_semi=1.5)
    with pytest.raises(ConfigError):
        SystemConfig(delta_duty=0.0)
    with pytest.raises(ConfigError):
        SystemConfig(gamma_th=0.3, gamma_sic=0.4)
    with pytest.raises(ConfigError):
        SystemConfig(d_r=0.5)
    with pytest.raises(ConfigError):
        SystemConfig(p_c=-1.0)
    with pytest.raises(ConfigError):
        SystemConfig(t_pulse=math.nan)


def test_infinite_threshold_is_allowed():
    assert SystemConfig(gamma_th=math.inf).gamma_th == math.inf


def test_transmit_snr_round_trip(default_cfg):
    sigma2 = default_cfg.sigma2
    cfg = SystemConfig.from_transmit_snr(rho_c_db=20.0, rho_r_db=10.0, rho_bs_db=40.0)
    assert cfg.p_c == pytest.approx(sigma2 * 100.0, rel=1e-12)
    assert cfg.transmit_snr_db("r") == pytest.approx(10.0, abs=1e-12)
    assert cfg.with_transmit_snr("bs", 50.0).p_bs == pytest.approx(power_from_snr_db(50.0, sigma2), rel=1e-15)
    assert default_cfg.transmit_snr_db("c") == pytest.approx(130.0, abs=1e-9)


def test_derive_constants_symmetry_and_no_radar_band(default_cfg):
    k = derive_constants(replace(default_cfg, d_r=default_cfg.d_c))
    assert k.a3 == 1.0
    k0 = derive_constants(replace(default_cfg, beta_semi=0.0))
    assert k0.a1 == 0.0 and k0.a4 == 0.0 and k0.e_td == 0.0 and k0.xi_r1 == 0.0


def test_derive_constants_independent_recomputation():
    cfg = SystemConfig(g_c=2.0, g_r=0.5, beta_semi=0.8, sigma_tau=2e-8)
    k = derive_constants(cfg)
    c_c = (3e8 / (4.0 * math.pi * 1e9)) ** 2
    c_r = 0.1 * (3e8 / 1e9) ** 2 / (4.0 * math.pi) ** 3
    sigma2 = k_B * 724.0 * 1e7
    e_td = (2.0 * math.pi) ** 2 / 12.0 * 0.8**2 * 1e7**2 * 2e-8**2
    interference = cfg.p_bs * 0.5 * c_r * 1300.0**-4.5 * e_td
    expected = {
        "a1": interference / (2.0 * c_c * 800.0**-2.5),
        "a2": sigma2 / (2.0 * c_c * 800.0**-2.5),
        "a3": 1300.0**-2.5 / 800.0**-2.5,
        "a4": interference / (2.0 * c_c * 1300.0**-2.5),
        "a5": sigma2 / (2.0 * c_c * 1300.0**-2.5),
        "xi_r1": 2.0 * 1e-6 * 0.8 * 1e7 * cfg.p_bs * 0.5 * c_r * e_td / sigma2,
        "e_td": e_td,
        "sigma2": sigma2,
    }
    for name, value in expected.items():
        assert getattr(k, name) == pytest.approx(value, rel=1e-12), name
    assert all(getattr(k, f) > 0 for f in ("a1", "a2", "a3", "a4", "a5", "xi_r1"))


def test_mean_radar_interference_formula(default_cfg):
    cfg = default_cfg
    expected = cfg.p_bs * path_loss_radar(cfg.d_r, cfg.pathloss) * time_delay_energy(
        cfg.beta_semi, cfg.bandwidth_b, cfg.sigma_tau
    )
    assert mean_radar_interference(cfg) == expected


def test_mean_radar_interference_matches_simulation(default_cfg):
    rng = np.random.default_rng(11)
    samples = radar_interference(_random_realization(rng, default_cfg.m, 1_000_000), default_cfg)
    se = math.sqrt(radar_interference_variance(default_cfg) / samples.size)
    assert abs(samples.mean() - mean_radar_interference(default_cfg)) < 3.0 * se


def test_interference_concentrates_for_large_m(default_cfg):
    mean = mean_radar_interference(default_cfg)
    cv_m3 = math.sqrt(radar_interference_variance(default_cfg)) / mean
    cv_m50 = math.sqrt(radar_interference_variance(replace(default_cfg, fading=FadingSpec(50.0)))) / mean
    assert cv_m50 < cv_m3
    assert cv_m50 == pytest.approx(math.sqrt((1.0 + 1.0 / 50.0) ** 2 - 1.0), rel=1e-12)


def test_sinr_comm_tx_special_cases(default_cfg):
    assert sinr_comm_tx(_realization(g_c=0.0), default_cfg, "instantaneous") == 0.0
    cfg = replace(default_cfg, p_r=0.0, beta_semi=0.0)
    expected = cfg.p_c * path_loss_comm(cfg.d_c, cfg.pathloss) / cfg.sigma2
    assert sinr_comm_tx(_realization(), cfg, InterferenceMode.MEAN) == pytest.approx(expected, rel=1e-14)


def test_sinr_comm_tx_arithmetic(default_cfg):
    cfg = default_cfg
    r = _realization(g_c=0.7, g_r=1.9, g_rd=0.4, g_ru=2.2)
    lc = path_loss_comm(cfg.d_c, cfg.pathloss)
    lr = path_loss_comm(cfg.d_r, cfg.pathloss)
    interference = cfg.p_bs * path_loss_radar(cfg.d_r, cfg.pathloss) * 0.4 * 2.2 * derive_constants(cfg).e_td
    expected = cfg.p_c * lc * 0.7 / (cfg.p_r * lr * 1.9 + interference + cfg.sigma2)
    assert sinr_comm_tx(r, cfg, "instantaneous") == pytest.approx(expected, rel=1e-13)


def test_sinr_radar_comm_cases(default_cfg):
    cfg = default_cfg
    assert sinr_radar_comm(_realization(g_r=0.0), cfg, "mean") == 0.0
    clean = replace(cfg, beta_semi=0.0)
    expected = clean.p_r * path_loss_comm(clean.d_r, clean.pathloss) * 1.3 / clean.sigma2
    assert sinr_radar_comm(_realization(g_r=1.3), clean, "instantaneous") == pytest.approx(expected, rel=1e-14)
    r = _realization(g_r=0.8, g_rd=1.5, g_ru=0.6)
    interference = cfg.p_bs * path_loss_radar(cfg.d_r, cfg.pathloss) * 0.9 * derive_constants(cfg).e_td
    expected = cfg.p_r * path_loss_comm(cfg.d_r, cfg.pathloss) * 0.8 / (interference + cfg.sigma2)
    assert sinr_radar_comm(r, cfg, "instantaneous") == pytest.approx(expected, rel=1e-13)


def test_snr_radar_echo(default_cfg):
    cfg = default_cfg
    expected = cfg.p_bs * PathLossParams().c_r * 1300.0**-4.5 * derive_constants(cfg).e_td / cfg.sigma2
    assert snr_radar_echo(_realization(), cfg) == pytest.approx(expected, rel=1e-12)
    assert snr_radar_echo(_realization(), replace(cfg, beta_semi=0.0)) == 0.0
    doubled = replace(cfg, p_bs=2.0 * cfg.p_bs)
    assert snr_radar_echo(_realization(), doubled) == pytest.approx(2.0 * expected, rel=1e-14)
    r = _realization(g_rd=0.5, g_ru=3.0)
    assert snr_radar_echo(r, cfg) == pytest.approx(1.5 * expected, rel=1e-14)


def test_echo_gain_matches_log_argument(default_cfg):
    cfg = default_cfg
    k = derive_constants(cfg)
    factor = 2.0 * cfg.t_pulse * cfg.beta_semi * cfg.bandwidth_b
    assert echo_gain(k, cfg) == pytest.approx(factor * snr_radar_echo(_realization(), cfg), rel=1e-12)


def test_interference_only_hurts(default_cfg):
    rng = np.random.default_rng(3)
    r = _random_realization(rng, default_cfg.m, 10_000)
    cfg = default_cfg
    bound = cfg.p_c * path_loss_comm(cfg.d_c, cfg.pathloss) * r.g_c_link / cfg.sigma2
    assert np.all(sinr_comm_tx(r, cfg, "instantaneous") <= bound)


def test_sinr_monotone_in_gains(default_cfg):
    base = sinr_comm_tx(_realization(g_c=1.0, g_r=1.0), default_cfg, "mean")
    assert sinr_comm_tx(_realization(g_c=1.1, g_r=1.0), default_cfg, "mean") > base
    assert sinr_comm_tx(_realization(g_c=1.0, g_r=1.1), default_cfg, "mean") < base


def test_outage_predicate_rearrangement(default_cfg):
    rng = np.random.default_rng(5)
    cfg = SystemConfig.from_transmit_snr(rho_c_db=118.0, g_c=1.7, g_r=0.6)
    k = derive_constants(cfg)
    r = _random_realization(rng, cfg.m, 20_000)
    direct = sinr_comm_tx(r, cfg, "mean") < cfg.gamma_th
    rearranged = r.g_c_link < cfg.gamma_th * (k.a3 * cfg.p_r * r.g_r_link + k.a1 + k.a2) / cfg.p_c
    assert 0 < direct.sum() < direct.size
    assert np.array_equal(direct, rearranged)


def test_channel_realization_rejects_negative_gain():
    with pytest.raises(DomainError):
        ChannelRealization(1.0, -0.1, 1.0, 1.0)


def test_unknown_interference_mode(default_cfg):
    with pytest.raises(ValueError):
        sinr_comm_tx(_realization(), default_cfg, "average")

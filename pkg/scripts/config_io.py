"""
Flat-JSON configuration files for SystemConfig.

Keys are SI-unit scalars named after the SystemConfig fields, plus the
fading shape `m`, the path-loss parameters (`alpha_c`, `alpha_r`, `f_c`,
`sigma_rcs`) and the transmit-SNR alternatives `rho_c_db`, `rho_r_db`,
`rho_bs_db` for the three powers. Missing keys fall back to the defaults
in constants.py; unknown keys are an error.
"""

import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from constants import (  # noqa: E402
    alpha_c_default,
    alpha_r_default,
    bandwidth_default,
    beta_semi_default,
    d_c_default,
    d_r_default,
    delta_duty_default,
    f_c_default,
    g_c_default,
    g_r_default,
    gamma_sic_default,
    gamma_th_default,
    m_default,
    rho_bs_db_default,
    rho_c_db_default,
    rho_r_db_default,
    sigma_rcs_default,
    sigma_tau_default,
    t_pulse_default,
    t_temp_default,
)
from scripts.channel import FadingSpec, PathLossParams  # noqa: E402
from scripts.linkbudget import ConfigError, SystemConfig, noise_power, power_from_snr_db  # noqa: E402
from scripts.specfun import DomainError  # noqa: E402

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "inputs" / "default_config.json"

SCALAR_DEFAULTS = {
    "d_c": d_c_default,
    "d_r": d_r_default,
    "beta_semi": beta_semi_default,
    "bandwidth_b": bandwidth_default,
    "t_temp": t_temp_default,
    "sigma_tau": sigma_tau_default,
    "gamma_th": gamma_th_default,
    "gamma_sic": gamma_sic_default,
    "delta_duty": delta_duty_default,
    "t_pulse": t_pulse_default,
    "g_c": g_c_default,
    "g_r": g_r_default,
}
FADING_DEFAULTS = {"m": m_default}
PATHLOSS_DEFAULTS = {
    "alpha_c": alpha_c_default,
    "alpha_r": alpha_r_default,
    "f_c": f_c_default,
    "sigma_rcs": sigma_rcs_default,
}
# watt key -> (transmit-SNR key, default SNR in dB)
POWER_KEYS = {
    "p_c": ("rho_c_db", rho_c_db_default),
    "p_r": ("rho_r_db", rho_r_db_default),
    "p_bs": ("rho_bs_db", rho_bs_db_default),
}
KNOWN_KEYS = (
    set(SCALAR_DEFAULTS)
    | set(FADING_DEFAULTS)
    | set(PATHLOSS_DEFAULTS)
    | set(POWER_KEYS)
    | {snr_key for snr_key, _ in POWER_KEYS.values()}
)


def _number(key, value, source):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{source}: key '{key}' must be a number (got {value!r}).")
    return float(value)


def config_from_mapping(mapping, source="<mapping>"):
    """
    Build a validated SystemConfig from a flat key/value mapping.

    Parameters:
    -----------
    mapping : dict
        Flat keys as documented in docs/README_CONFIG.md.
    source : str
        Label used in error and log messages.

    Returns:
    --------
    cfg : SystemConfig
    """
    unknown = sorted(set(mapping) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"{source}: unknown key(s) {', '.join(unknown)}.")
    values = {key: _number(key, value, source) for key, value in mapping.items()}

    missing = []

    def pick(key, default):
        if key in values:
            return values[key]
        missing.append(key)
        return default

    scalars = {key: pick(key, default) for key, default in SCALAR_DEFAULTS.items()}
    fading_kwargs = {key: pick(key, default) for key, default in FADING_DEFAULTS.items()}
    pathloss_kwargs = {key: pick(key, default) for key, default in PATHLOSS_DEFAULTS.items()}

    try:
        sigma2 = noise_power(scalars["bandwidth_b"], scalars["t_temp"])
        powers = {}
        for watt_key, (snr_key, snr_default) in POWER_KEYS.items():
            if watt_key in values and snr_key in values:
                raise ConfigError(f"{source}: give either '{watt_key}' or '{snr_key}', not both.")
            if watt_key in values:
                powers[watt_key] = values[watt_key]
            else:
                powers[watt_key] = power_from_snr_db(pick(snr_key, snr_default), sigma2)
        cfg = SystemConfig(
            **powers,
            **scalars,
            fading=FadingSpec(**fading_kwargs),
            pathloss=PathLossParams(**pathloss_kwargs),
        )
    except ConfigError as err:
        if str(err).startswith(source):
            raise
        raise ConfigError(f"{source}: {err}") from err
    except DomainError as err:
        raise ConfigError(f"{source}: {err}") from err

    if missing:
        logger.info("%s: using defaults for %s", source, ", ".join(missing))
    return cfg


def load_config(path=None):
    """
    Read and validate a flat-JSON configuration file.

    An empty file (or path=None with no shipped default) yields the full
    default configuration. Parse errors report the line and column.
    """
    path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"Cannot read config file {path}: {err}") from err
    if not text.strip():
        return config_from_mapping({}, str(path))
    try:
        mapping = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from err
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: top level must be a JSON object of flat keys.")
    return config_from_mapping(mapping, str(path))


def config_to_dict(cfg):
    """Flat dict of a resolved config (watts plus the equivalent transmit SNRs)."""
    flat = {key: value for key, value in asdict(cfg).items() if key not in ("fading", "pathloss")}
    flat.update(asdict(cfg.fading))
    flat.update(asdict(cfg.pathloss))
    for watt_key, (snr_key, _) in POWER_KEYS.items():
        flat[snr_key] = cfg.transmit_snr_db(watt_key[2:])
    return flat

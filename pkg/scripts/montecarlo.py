"""
Seeded, parallel Monte Carlo estimation of both outage probabilities and
of the ergodic REIR, plus fixed-bin histograms of the simulated quantities.

Trials are cut into blocks of `constants.mc_block_trials`; block b always
draws from SeedSequence(base_seed, spawn_key=(b,)), and per-block sums are
reduced in block order. Estimates therefore depend only on (config, plan)
and are bit-identical for any number of worker processes.
"""

import logging
import math
import os
import sys
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from constants import ci_z95, mc_block_trials, mc_seed_default, workers_env_var  # noqa: E402
from scripts.analytic import reir_instant  # noqa: E402
from scripts.linkbudget import (  # noqa: E402
    ChannelRealization,
    ConfigError,
    InterferenceMode,
    sinr_comm_tx,
    sinr_radar_comm,
    snr_radar_echo,
)
from scripts.specfun import require  # noqa: E402

logger = logging.getLogger(__name__)

QUANTITIES = ("g_c", "g_r", "g_rd_g_ru", "sinr_c", "sinr_r", "echo_snr")
_QUANTITY_ALIASES = {"g_rd·g_ru": "g_rd_g_ru", "g_rd*g_ru": "g_rd_g_ru"}


@dataclass(frozen=True)
class TrialPlan:
    """How many trials to run, from which seed, on how many worker processes."""

    n_trials: int
    base_seed: int = mc_seed_default
    n_streams: int = 1
    interference_mode: str = InterferenceMode.MEAN.value

    def __post_init__(self):
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ConfigError(f"TrialPlan.n_trials must be a positive integer (got {self.n_trials}).")
        if int(self.base_seed) != self.base_seed or not 0 <= self.base_seed < 2**64:
            raise ConfigError(f"TrialPlan.base_seed must be an unsigned 64-bit integer (got {self.base_seed}).")
        if int(self.n_streams) != self.n_streams or self.n_streams < 1:
            raise ConfigError(f"TrialPlan.n_streams must be a positive integer (got {self.n_streams}).")
        try:
            InterferenceMode(self.interference_mode)
        except ValueError:
            raise ConfigError(f"Unknown interference mode: {self.interference_mode!r}") from None


@dataclass(frozen=True)
class EstimateWithCI:
    estimate: float
    std_error: float
    ci95_low: float
    ci95_high: float
    n_trials: int


@dataclass(frozen=True)
class Histogram:
    """Fixed-bin histogram; values outside [edges[0], edges[-1]] are counted separately."""

    quantity: str
    edges: np.ndarray
    counts: np.ndarray
    underflow: int
    overflow: int
    n_trials: int
    sample_mean: float

    def density(self):
        """Counts normalized to a probability density over all trials."""
        return self.counts / (self.n_trials * np.diff(self.edges))


def resolve_workers(requested=None):
    """Worker count: explicit request, else the SEMI_ISAC_WORKERS environment variable, else 1."""
    if requested is None:
        raw = os.environ.get(workers_env_var)
        if raw is None or raw.strip() == "":
            return 1
        try:
            requested = int(raw)
        except ValueError:
            raise ConfigError(f"{workers_env_var} must be an integer (got {raw!r}).") from None
    if requested < 1:
        raise ConfigError(f"Worker count must be >= 1 (got {requested}).")
    return int(requested)


def _block_sizes(n_trials):
    full, rest = divmod(int(n_trials), mc_block_trials)
    return [mc_block_trials] * full + ([rest] if rest else [])


def draw_block(cfg, base_seed, block_index, n):
    """Channel realization for one block; gains are drawn in the order g_c, g_r, g_rd, g_ru."""
    rng = np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(block_index,)))
    m = cfg.m
    gains = rng.gamma(shape=m, scale=1.0 / m, size=(4, n))
    return ChannelRealization(*gains)


def _quantity_values(cfg, realization, mode, quantity):
    if quantity == "outage_comm_tx":
        return (sinr_comm_tx(realization, cfg, mode) < cfg.gamma_th).astype(float)
    if quantity == "outage_radar_comm":
        sic_ok = sinr_comm_tx(realization, cfg, mode) > cfg.gamma_sic
        own_ok = sinr_radar_comm(realization, cfg, mode) > cfg.gamma_th
        return (~(sic_ok & own_ok)).astype(float)
    if quantity == "ergodic_reir":
        return np.asarray(reir_instant(snr_radar_echo(realization, cfg), cfg), dtype=float)
    if quantity == "g_c":
        return np.asarray(realization.g_c_link)
    if quantity == "g_r":
        return np.asarray(realization.g_r_link)
    if quantity == "g_rd_g_ru":
        return np.asarray(realization.g_rd) * np.asarray(realization.g_ru)
    if quantity == "sinr_c":
        return np.asarray(sinr_comm_tx(realization, cfg, mode), dtype=float)
    if quantity == "sinr_r":
        return np.asarray(sinr_radar_comm(realization, cfg, mode), dtype=float)
    if quantity == "echo_snr":
        return np.asarray(snr_radar_echo(realization, cfg), dtype=float)
    raise ValueError(f"Unknown Monte Carlo quantity: {quantity!r}")


def _run_block(task):
    """Worker entry: sums (or histogram counts) of one block. Must stay module-level for pickling."""
    cfg, base_seed, mode, quantity, block_index, n, edges = task
    realization = draw_block(cfg, base_seed, block_index, n)
    values = np.broadcast_to(_quantity_values(cfg, realization, mode, quantity), (n,))
    total = float(np.sum(values))
    if edges is None:
        return total, float(np.sum(values * values))
    counts, _ = np.histogram(values, bins=edges)
    return total, counts, int(np.sum(values < edges[0])), int(np.sum(values > edges[-1]))


def _map_blocks(cfg, plan, quantity, edges=None):
    sizes = _block_sizes(plan.n_trials)
    mode = InterferenceMode(plan.interference_mode).value
    tasks = [(cfg, plan.base_seed, mode, quantity, b, n, edges) for b, n in enumerate(sizes)]
    workers = min(plan.n_streams, len(tasks))
    logger.debug("%s: %d trials in %d blocks on %d worker(s)", quantity, plan.n_trials, len(tasks), workers)
    if workers == 1:
        return [_run_block(t) for t in tasks]
    with Pool(processes=workers) as pool:
        return pool.map(_run_block, tasks)


def _reduce_sums(partials):
    s1 = 0.0
    s2 = 0.0
    for block_s1, block_s2 in partials:
        s1 += block_s1
        s2 += block_s2
    return s1, s2


def wilson_interval(successes, n, z=ci_z95):
    """
    Wilson score interval for a binomial proportion.

    Returns:
    --------
    low, high : float
        Always satisfies low <= successes/n <= high.
    """
    require(n >= 1, "wilson_interval needs n >= 1.")
    p_hat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p_hat + z2 / (2.0 * n)) / denom
    half = z / denom * math.sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n))
    return min(max(center - half, 0.0), p_hat), max(min(center + half, 1.0), p_hat)


def _proportion_estimate(partials, n):
    failures, _ = _reduce_sums(partials)
    p_hat = failures / n
    low, high = wilson_interval(failures, n)
    return EstimateWithCI(p_hat, math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n), low, high, n)


def simulate_outage_comm_tx(cfg, plan):
    """Fraction of trials with SINR of the communication transmitter below γ_th (Wilson 95% CI)."""
    return _proportion_estimate(_map_blocks(cfg, plan, "outage_comm_tx"), plan.n_trials)


def simulate_outage_radar_comm(cfg, plan):
    """
    Fraction of trials in which the radar target's uplink is lost.

    Success needs the near user to clear γ_SIC and the radar target to clear
    γ_th on the same realization.
    """
    return _proportion_estimate(_map_blocks(cfg, plan, "outage_radar_comm"), plan.n_trials)


def simulate_ergodic_reir(cfg, plan):
    """
    Sample mean of the instantaneous REIR with a normal 95% CI.

    The echo SNR is always the realized one: the radar return is the wanted
    signal here, so plan.interference_mode does not apply.
    """
    n = plan.n_trials
    s1, s2 = _reduce_sums(_map_blocks(cfg, plan, "ergodic_reir"))
    mean = s1 / n
    variance = max(s2 - s1 * s1 / n, 0.0) / (n - 1) if n > 1 else 0.0
    std_error = math.sqrt(variance / n)
    return EstimateWithCI(mean, std_error, mean - ci_z95 * std_error, mean + ci_z95 * std_error, n)


def _unit_scale(cfg, mode, quantity):
    """Value of a quantity when every small-scale gain equals its unit mean."""
    ones = ChannelRealization(np.ones(1), np.ones(1), np.ones(1), np.ones(1))
    return float(_quantity_values(cfg, ones, mode, quantity)[0])


def empirical_distribution(cfg, plan, which, edges=None, bins=50):
    """
    Fixed-bin histogram of one simulated quantity.

    Parameters:
    -----------
    cfg : SystemConfig
    plan : TrialPlan
    which : str
        One of 'g_c', 'g_r', 'g_rd_g_ru' (alias 'g_rd·g_ru'), 'sinr_c', 'sinr_r', 'echo_snr'.
    edges : array-like or None
        Bin edges; default is `bins` equal bins on [0, 8 × the unit-gain value].
    bins : int

    Returns:
    --------
    histogram : Histogram
    """
    quantity = _QUANTITY_ALIASES.get(which, which)
    if quantity not in QUANTITIES:
        raise ValueError(f"Unknown quantity {which!r}; expected one of {QUANTITIES}.")
    mode = InterferenceMode(plan.interference_mode).value
    if edges is None:
        scale = _unit_scale(cfg, mode, quantity)
        require(scale > 0, f"Default bins need a positive unit value of {quantity}; pass explicit edges.")
        edges = np.linspace(0.0, 8.0 * scale, int(bins) + 1)
    edges = np.asarray(edges, dtype=float)
    require(edges.ndim == 1 and edges.size >= 2 and np.all(np.diff(edges) > 0),
            "Histogram edges must be a strictly increasing 1-D array.")
    partials = _map_blocks(cfg, plan, quantity, edges)
    total = 0.0
    counts = np.zeros(edges.size - 1, dtype=np.int64)
    underflow = 0
    overflow = 0
    for block_total, block_counts, block_under, block_over in partials:
        total += block_total
        counts += block_counts
        underflow += block_under
        overflow += block_over
    return Histogram(quantity, edges, counts, underflow, overflow, plan.n_trials, total / plan.n_trials)

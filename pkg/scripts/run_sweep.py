"""
Parameter sweeps over one configuration axis.

Each row sets one axis value on the base configuration and evaluates the
requested (metric, method) cells. Rows are independent and run in a process
pool when more than one worker is requested; a cell that raises is stored
as NaN and listed in the table's failure records.
"""

import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field, replace
from multiprocessing import Pool
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from constants import (  # noqa: E402
    fig1_rho_c_db,
    fig2_d_r_values,
    fig2_rho_bs_db,
    fig3_duty_pulse_pairs,
    fig3_rho_bs_db,
    mc_trials_default,
)
from scripts import __version__  # noqa: E402
from scripts.analytic import ergodic_reir, outage_comm_tx, outage_radar_comm  # noqa: E402
from scripts.config_io import config_to_dict  # noqa: E402
from scripts.linkbudget import ConfigError  # noqa: E402
from scripts.montecarlo import (  # noqa: E402
    TrialPlan,
    resolve_workers,
    simulate_ergodic_reir,
    simulate_outage_comm_tx,
    simulate_outage_radar_comm,
)
from scripts.specfun import DEFAULT_QUAD  # noqa: E402

logger = logging.getLogger(__name__)

AXES = ("rho_c_db", "rho_bs_db", "beta_semi", "gamma_th", "delta_duty", "t_pulse", "d_r")
METRICS = ("outage_comm_tx", "outage_radar_comm", "ergodic_reir")
METHODS = ("closed", "integral", "monte_carlo")
MC_SUFFIXES = ("std_error", "ci_low", "ci_high")

_AXIS_DOMAINS = {
    "rho_c_db": lambda v: math.isfinite(v),
    "rho_bs_db": lambda v: math.isfinite(v),
    "beta_semi": lambda v: 0.0 <= v <= 1.0,
    "gamma_th": lambda v: v >= 0.0,
    "delta_duty": lambda v: 0.0 < v <= 1.0,
    "t_pulse": lambda v: v > 0.0,
    "d_r": lambda v: v >= 1.0,
}

_ANALYTIC = {
    "outage_comm_tx": lambda cfg, method, quad: outage_comm_tx(cfg, method, quad).probability,
    "outage_radar_comm": lambda cfg, method, quad: outage_radar_comm(cfg, method, quad).probability,
    "ergodic_reir": lambda cfg, method, quad: ergodic_reir(cfg, method, quad).rate,
}
_SIMULATED = {
    "outage_comm_tx": simulate_outage_comm_tx,
    "outage_radar_comm": simulate_outage_radar_comm,
    "ergodic_reir": simulate_ergodic_reir,
}


def parse_metric(text):
    """'metric:method' -> (metric, method)."""
    metric, sep, method = str(text).partition(":")
    if not sep or metric not in METRICS or method not in METHODS:
        raise ConfigError(
            f"Bad metric {text!r}; expected 'metric:method' with metric in {METRICS} and method in {METHODS}."
        )
    return metric, method


def column_name(metric, method):
    return f"{metric}_{method}"


@dataclass(frozen=True)
class SweepSpec:
    """One axis, its ascending values and the (metric, method) cells to evaluate per row."""

    axis: str
    values: tuple
    metrics: tuple
    trials: TrialPlan = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"Unknown sweep axis {self.axis!r}; expected one of {AXES}.")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigError("Sweep values must be nonempty.")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ConfigError("Sweep values must be ascending.")
        bad = [v for v in values if not _AXIS_DOMAINS[self.axis](v)]
        if bad:
            raise ConfigError(f"Values {bad} are outside the domain of {self.axis}.")
        metrics = tuple(parse_metric(m) if isinstance(m, str) else tuple(m) for m in self.metrics)
        if not metrics:
            raise ConfigError("Sweep metrics must be nonempty.")
        for metric, method in metrics:
            parse_metric(f"{metric}:{method}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "metrics", metrics)
        if self.trials is None and any(method == "monte_carlo" for _, method in metrics):
            object.__setattr__(self, "trials", TrialPlan(mc_trials_default))

    @property
    def columns(self):
        cols = [self.axis]
        for metric, method in self.metrics:
            name = column_name(metric, method)
            cols.append(name)
            if method == "monte_carlo":
                cols.extend(f"{name}_{suffix}" for suffix in MC_SUFFIXES)
        return cols


@dataclass
class ResultTable:
    """Sweep results: one row per axis value plus the metadata needed to rerun any row."""

    frame: pd.DataFrame
    metadata: dict
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    @property
    def axis(self):
        return self.frame.columns[0]


def load_sweep_file(path, trials=None):
    """Read a SweepSpec from JSON with keys 'axis', 'values' and 'metrics' ('metric:method' strings)."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from err
    unknown = sorted(set(data) - {"axis", "values", "metrics"})
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {', '.join(unknown)}.")
    try:
        return SweepSpec(data["axis"], tuple(data["values"]), tuple(data["metrics"]), trials)
    except KeyError as err:
        raise ConfigError(f"{path}: missing key {err}.") from None


def apply_axis(cfg, axis, value):
    """Copy of cfg with one sweep-axis value applied; the configured value returns cfg itself."""
    snr_link = {"rho_c_db": "c", "rho_bs_db": "bs"}.get(axis)
    if snr_link is not None:
        # no dB round trip at the configured point
        if value == cfg.transmit_snr_db(snr_link):
            return cfg
        return cfg.with_transmit_snr(snr_link, value)
    if axis in AXES:
        return replace(cfg, **{axis: value})
    raise ConfigError(f"Unknown sweep axis {axis!r}.")


def evaluate_cell(cfg, metric, method, plan=None, quad=DEFAULT_QUAD):
    """
    Evaluate one (metric, method) pair at one configuration.

    Returns:
    --------
    cells : dict
        Column name -> value; Monte Carlo cells also carry std error and CI bounds.
    """
    name = column_name(metric, method)
    if method != "monte_carlo":
        return {name: float(_ANALYTIC[metric](cfg, method, quad))}
    result = _SIMULATED[metric](cfg, plan)
    return {
        name: result.estimate,
        f"{name}_std_error": result.std_error,
        f"{name}_ci_low": result.ci95_low,
        f"{name}_ci_high": result.ci95_high,
    }


def _evaluate_row(task):
    """Worker entry for one sweep row. Module-level for pickling."""
    cfg, spec, value, plan, quad = task
    row = {column: np.nan for column in spec.columns}
    row[spec.axis] = value
    failures = []
    try:
        point = apply_axis(cfg, spec.axis, value)
    except (ValueError, ArithmeticError) as err:
        for metric, method in spec.metrics:
            failures.append({spec.axis: value, "column": column_name(metric, method), "message": str(err)})
        return row, failures
    for metric, method in spec.metrics:
        try:
            row.update(evaluate_cell(point, metric, method, plan, quad))
        except (ValueError, ArithmeticError, RuntimeError) as err:
            failures.append({spec.axis: value, "column": column_name(metric, method), "message": str(err)})
            continue
        bad = [c for c in row if c.startswith(column_name(metric, method)) and not np.isfinite(row[c])]
        if bad:
            failures.append({spec.axis: value, "column": column_name(metric, method),
                             "message": "non-finite result"})
    return row, failures


def run_sweep(cfg, sweep, workers=None, quad=DEFAULT_QUAD, progress=True):
    """
    Evaluate every row of a sweep.

    Parameters:
    -----------
    cfg : SystemConfig
        Base configuration; each row replaces the sweep axis only.
    sweep : SweepSpec
    workers : int or None
        Row-level worker processes (None: SEMI_ISAC_WORKERS or 1).
    quad : QuadratureSpec
    progress : bool
        Show a tqdm progress bar over rows.

    Returns:
    --------
    table : ResultTable
    """
    workers = min(resolve_workers(workers), len(sweep.values))
    plan = sweep.trials
    if plan is not None and workers > 1:
        # rows already occupy the pool; results do not depend on n_streams
        plan = replace(plan, n_streams=1)
    tasks = [(cfg, sweep, value, plan, quad) for value in sweep.values]
    bar = dict(total=len(tasks), desc=f"sweep {sweep.axis}", unit="row", disable=not progress)
    if workers == 1:
        outcomes = [_evaluate_row(t) for t in tqdm(tasks, **bar)]
    else:
        with Pool(processes=workers) as pool:
            outcomes = list(tqdm(pool.imap(_evaluate_row, tasks), **bar))

    rows = [row for row, _ in outcomes]
    failures = [failure for _, row_failures in outcomes for failure in row_failures]
    frame = pd.DataFrame(rows, columns=sweep.columns).sort_values(sweep.axis, kind="stable")
    frame = frame.reset_index(drop=True)
    metadata = {
        "tool": "semi_isac",
        "version": __version__,
        "axis": sweep.axis,
        "metrics": ",".join(f"{metric}:{method}" for metric, method in sweep.metrics),
        "seed": plan.base_seed if plan is not None else "",
        "trials": plan.n_trials if plan is not None else "",
        "interference_mode": plan.interference_mode if plan is not None else "",
        **{f"config.{key}": value for key, value in config_to_dict(cfg).items()},
    }
    for failure in failures:
        logger.warning("sweep %s=%r, %s failed: %s", sweep.axis, failure[sweep.axis],
                       failure["column"], failure["message"])
    return ResultTable(frame, metadata, failures)


@dataclass(frozen=True)
class PresetRun:
    """One table of a figure preset: label, base configuration and sweep."""

    label: str
    cfg: object
    sweep: SweepSpec


def preset_runs(name, cfg, trials=None):
    """
    Sweeps reproducing the three result figures.

    fig1: both outages versus ρ_c (closed form and Monte Carlo).
    fig2: ergodic REIR versus ρ_BS for each radar-target distance.
    fig3: ergodic REIR versus ρ_BS for several (duty factor, pulse duration) pairs.
    """
    trials = trials if trials is not None else TrialPlan(mc_trials_default)
    if name == "fig1":
        metrics = ("outage_comm_tx:closed", "outage_comm_tx:monte_carlo",
                   "outage_radar_comm:closed", "outage_radar_comm:monte_carlo")
        return [PresetRun("fig1", cfg, SweepSpec("rho_c_db", tuple(fig1_rho_c_db), metrics, trials))]
    if name == "fig2":
        metrics = ("ergodic_reir:closed", "ergodic_reir:integral", "ergodic_reir:monte_carlo")
        reir_trials = replace(trials, interference_mode="instantaneous")
        return [
            PresetRun(f"fig2_d_r_{d_r:g}", replace(cfg, d_r=float(d_r)),
                      SweepSpec("rho_bs_db", tuple(fig2_rho_bs_db), metrics, reir_trials))
            for d_r in fig2_d_r_values
        ]
    if name == "fig3":
        metrics = ("ergodic_reir:closed", "ergodic_reir:monte_carlo")
        reir_trials = replace(trials, interference_mode="instantaneous")
        return [
            PresetRun(f"fig3_delta_{delta:g}_T_{t_pulse:g}", replace(cfg, delta_duty=delta, t_pulse=t_pulse),
                      SweepSpec("rho_bs_db", tuple(fig3_rho_bs_db), metrics, reir_trials))
            for delta, t_pulse in fig3_duty_pulse_pairs
        ]
    raise ConfigError(f"Unknown preset {name!r}; expected fig1, fig2 or fig3.")

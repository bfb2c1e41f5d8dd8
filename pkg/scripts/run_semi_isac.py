"""
Command-line entry point.

    python scripts/run_semi_isac.py eval     --config inputs/default_config.json
    python scripts/run_semi_isac.py sweep    --axis rho_c_db --values 110,120,130 \\
                                             --metrics outage_comm_tx:closed,outage_comm_tx:monte_carlo
    python scripts/run_semi_isac.py fig1|fig2|fig3 --trials 1e5 --out outputs/figures
    python scripts/run_semi_isac.py selftest --trials 2e5

Every table is written as <out>/<name>.csv plus a matplotlib script
<out>/<name>.py. Exit status is 0 iff every requested cell was computed,
1 if any cell (or selftest check) failed and 2 for configuration errors.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from constants import (  # noqa: E402
    diversity_offsets_db,
    mc_seed_default,
    mc_trials_default,
    output_dir_default,
)
from scripts import __version__  # noqa: E402
from scripts.analytic import (  # noqa: E402
    PreconditionError,
    diversity_slope,
    outage_diversity_order,
    outage_noma_baseline,
)
from scripts.check_agreement import SELFTEST_TRIALS, print_report, run_selftest  # noqa: E402
from scripts.config_io import load_config  # noqa: E402
from scripts.emit_results import emit_csv, emit_plot_script  # noqa: E402
from scripts.linkbudget import ConfigError, power_from_snr_db  # noqa: E402
from scripts.montecarlo import TrialPlan, resolve_workers  # noqa: E402
from scripts.run_sweep import (  # noqa: E402
    AXES,
    METHODS,
    METRICS,
    SweepSpec,
    load_sweep_file,
    preset_runs,
    run_sweep,
)
from scripts.specfun import QuadratureError  # noqa: E402

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_CELLS = 1
EXIT_CONFIG_ERROR = 2


def _parse_floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"Cannot parse value list {text!r}.") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="Flat-JSON config file (default: inputs/default_config.json).")
    common.add_argument("--out", default=output_dir_default, help="Output directory for CSV tables and plot scripts.")
    common.add_argument("--trials", type=float, default=None, help="Monte Carlo trials per point (accepts 1e5).")
    common.add_argument("--seed", type=int, default=mc_seed_default, help="Base seed (unsigned 64-bit).")
    common.add_argument("--mode", choices=["mean", "instantaneous"], default="mean",
                        help="Radar interference seen by the communication links in Monte Carlo runs.")
    common.add_argument("--format", choices=["csv"], default="csv", help="Result table format.")
    common.add_argument("--workers", type=int, default=None,
                        help="Worker processes (default: SEMI_ISAC_WORKERS or 1).")
    common.add_argument("--no-progress", action="store_true", help="Hide progress bars.")
    common.add_argument("--verbose", action="store_true", help="Debug logging.")

    parser = argparse.ArgumentParser(description="NOMA Semi-ISaC outage and radar-rate analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="Evaluate every metric at one configuration.")
    sweep = sub.add_parser("sweep", parents=[common], help="Sweep one configuration axis.")
    sweep.add_argument("--axis", choices=AXES, help="Swept parameter.")
    sweep.add_argument("--values", help="Comma-separated ascending axis values.")
    sweep.add_argument("--metrics", help=f"Comma-separated metric:method pairs, metric in {METRICS}, "
                                         f"method in {METHODS}.")
    sweep.add_argument("--sweep-file", help="JSON file with keys axis, values and metrics.")
    for name in ("fig1", "fig2", "fig3"):
        sub.add_parser(name, parents=[common], help=f"Preset sweep for {name}.")
    sub.add_parser("selftest", parents=[common], help="Closed form / integral / Monte Carlo agreement suite.")
    return parser


def _trial_plan(args, workers):
    trials = int(args.trials) if args.trials is not None else mc_trials_default
    return TrialPlan(trials, args.seed, workers, args.mode)


def _write_table(table, out_dir, name):
    csv_path = emit_csv(table, Path(out_dir) / f"{name}.csv")
    script_path = emit_plot_script(table, Path(out_dir) / f"{name}.py", csv_path.name)
    print(f"Table saved to {csv_path}")
    print(f"Plot script saved to {script_path}")


def _print_table(table):
    print(table.frame.to_string(index=False, float_format=lambda v: f"{v:.6e}"))


def cmd_eval(args, cfg, workers):
    plan = _trial_plan(args, workers)
    metrics = tuple(f"{metric}:{method}" for metric in METRICS for method in METHODS)
    sweep = SweepSpec("rho_c_db", (cfg.transmit_snr_db("c"),), metrics, plan)
    table = run_sweep(cfg, sweep, workers=1, progress=not args.no_progress)

    print("\nSingle-point evaluation:")
    print("=" * 60)
    row = table.frame.iloc[0]
    for column in table.frame.columns[1:]:
        print(f"  {column:45s} {row[column]:.6e}")

    print("\nConventional NOMA (no shared radar band):")
    for name, result in outage_noma_baseline(cfg).items():
        print(f"  {name:45s} {result.probability:.6e}")

    print("\nOutage diversity order (slope of -ln P_out against ln P_c):")
    c_grid = power_from_snr_db(cfg.transmit_snr_db("c") + diversity_offsets_db, cfg.sigma2)
    for name in ("outage_comm_tx", "outage_radar_comm"):
        try:
            print(f"  {name:45s} {outage_diversity_order(cfg, c_grid, name):.4f}")
        except (PreconditionError, QuadratureError) as err:
            print(f"  {name:45s} not available: {err}")

    print("\nDiversity slope of ergodic REIR:")
    prelog = cfg.delta_duty / (2.0 * cfg.t_pulse)
    try:
        grid = power_from_snr_db(cfg.transmit_snr_db("bs") + diversity_offsets_db, cfg.sigma2)
        slope = diversity_slope(cfg, grid)
        print(f"  S = {slope:.6e} bits/s per log2(P_BS)   (prelog delta/(2T) = {prelog:.6e})")
    except PreconditionError as err:
        print(f"  not available: {err}")
    print("=" * 60)

    _write_table(table, args.out, "eval")
    return table.ok


def cmd_sweep(args, cfg, workers):
    plan = _trial_plan(args, workers)
    if args.sweep_file:
        sweep = load_sweep_file(args.sweep_file, plan)
    else:
        if not (args.axis and args.values and args.metrics):
            raise ConfigError("sweep needs --axis, --values and --metrics (or --sweep-file).")
        metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
        sweep = SweepSpec(args.axis, _parse_floats(args.values), metrics, plan)
    table = run_sweep(cfg, sweep, workers=workers, progress=not args.no_progress)
    _print_table(table)
    _write_table(table, args.out, f"sweep_{sweep.axis}")
    return table.ok


def cmd_preset(args, cfg, workers):
    ok = True
    for run in preset_runs(args.command, cfg, _trial_plan(args, workers)):
        print(f"\n{run.label}:")
        print("=" * 60)
        table = run_sweep(run.cfg, run.sweep, workers=workers, progress=not args.no_progress)
        _print_table(table)
        _write_table(table, args.out, run.label)
        ok = ok and table.ok
    return ok


def cmd_selftest(args, cfg, workers):
    trials = int(args.trials) if args.trials is not None else SELFTEST_TRIALS
    checks = run_selftest(cfg, trials, args.seed, workers)
    print_report(checks)
    return all(c.passed for c in checks)


COMMANDS = {
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "fig1": cmd_preset,
    "fig2": cmd_preset,
    "fig3": cmd_preset,
    "selftest": cmd_selftest,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        workers = resolve_workers(args.workers)
        cfg = load_config(args.config)
        ok = COMMANDS[args.command](args, cfg, workers)
    except ConfigError as err:
        print(f"Configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    return EXIT_OK if ok else EXIT_FAILED_CELLS


if __name__ == "__main__":
    sys.exit(main())

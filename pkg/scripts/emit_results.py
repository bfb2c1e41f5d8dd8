"""
Writers (and a reader) for sweep result tables.

CSV layout: a block of `# key=value` metadata lines (tool version, seed,
trial count, the full resolved configuration and one `# failure=` line per
failed cell), then a header row and one row per axis value. Floats are
written in their shortest round-trip form.
"""

import json
import os
import sys
from pathlib import Path

import pandas as pd

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from scripts.run_sweep import MC_SUFFIXES, ResultTable  # noqa: E402

_FAILURE_KEY = "failure"


def _format_meta(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_meta(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def emit_csv(table, path):
    """Write a ResultTable as CSV with a leading metadata comment block."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in table.metadata.items():
            f.write(f"# {key}={_format_meta(value)}\n")
        for failure in table.failures:
            f.write(f"# {_FAILURE_KEY}={json.dumps(failure, sort_keys=True)}\n")
        table.frame.to_csv(f, index=False)
    return path


def read_results_csv(path):
    """Parse a CSV written by emit_csv back into a ResultTable."""
    path = Path(path)
    metadata = {}
    failures = []
    n_comment = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.startswith("# "):
                break
            n_comment += 1
            key, _, value = line[2:].rstrip("\n").partition("=")
            if key == _FAILURE_KEY:
                failures.append(json.loads(value))
            else:
                metadata[key] = _parse_meta(value)
    frame = pd.read_csv(path, skiprows=n_comment, float_precision="round_trip")
    return ResultTable(frame, metadata, failures)


def _series_columns(frame):
    axis = frame.columns[0]
    return [c for c in frame.columns[1:] if not c.endswith(tuple(f"_{s}" for s in MC_SUFFIXES))], axis


_PLOT_TEMPLATE = '''"""
Plot {csv_name} (generated by scripts/emit_results.py).
"""

from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

HERE = Path(__file__).resolve().parent
df = pd.read_csv(HERE / "{csv_name}", comment="#")

AXIS = "{axis}"
PANELS = {panels!r}
LOG_Y = {log_y!r}

fig, axes = plt.subplots(len(PANELS), 1, figsize=(8, 6 * len(PANELS)), squeeze=False)
for ax, (metric, columns) in zip(axes[:, 0], PANELS.items()):
    for column in columns:
        method = column[len(metric) + 1:]
        if method == "monte_carlo":
            yerr = [df[column] - df[column + "_ci_low"], df[column + "_ci_high"] - df[column]]
            ax.errorbar(df[AXIS], df[column], yerr=yerr, fmt="o", capsize=3, label=method)
        else:
            ax.plot(df[AXIS], df[column], "-", linewidth=2, label=method)
    if metric in LOG_Y:
        ax.set_yscale("log")
    ax.set_xlabel(AXIS)
    ax.set_ylabel(metric)
    ax.grid(True, alpha=0.3)
    ax.legend()

plt.tight_layout()
output_file = HERE / "{png_name}"
plt.savefig(output_file, dpi=300)
print(f"Plot saved to {{output_file}}")
'''


def emit_plot_script(table, path, csv_name=None):
    """
    Write a matplotlib script that plots the table's CSV.

    The script reads the CSV by name from its own directory and draws one
    series per (metric, method) column, one panel per metric, with a
    log-scaled y axis for outage probabilities.

    Parameters:
    -----------
    table : ResultTable
    path : str or Path
        Destination .py file.
    csv_name : str or None
        File name of the CSV next to the script (default: same stem, .csv).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    csv_name = csv_name or path.with_suffix(".csv").name
    columns, axis = _series_columns(table.frame)
    panels = {}
    for column in columns:
        metric = next(m for m in ("outage_comm_tx", "outage_radar_comm", "ergodic_reir") if column.startswith(m))
        panels.setdefault(metric, []).append(column)
    log_y = [m for m in panels if m.startswith("outage")]
    path.write_text(
        _PLOT_TEMPLATE.format(csv_name=csv_name, axis=axis, panels=panels, log_y=log_y,
                              png_name=path.with_suffix(".png").name),
        encoding="utf-8",
    )
    return path

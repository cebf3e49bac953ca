# Notes:
#   Turns a sweep CSV into gnuplot-ready series: one two-column file
#   "<x> <mean y over seeds>" per (variant, metric). The x column is node_count
#   when the sweep varies the network size, selfish_pct otherwise.
#
# Purpose:
#   Plot data only; rendering the figures is left to external tools.

from __future__ import annotations

from pathlib import Path
from typing import Dict, Sequence, Tuple

import pandas as pd

from src.metrics.record import FLOAT_FORMAT, read_metrics_frame
from src.utils.io_utils import write_text_atomic

DEFAULT_METRICS = ("pdr", "total_overhead")


def series_axis(df: pd.DataFrame) -> str:
    """node_count if it varies across rows, selfish_pct otherwise."""
    return "node_count" if df["node_count"].nunique() > 1 else "selfish_pct"


def emit_plot_data(
    csv_text: str, metrics: Sequence[str] = DEFAULT_METRICS
) -> Dict[Tuple[str, str], str]:
    """
    Builds the series texts of a sweep CSV.
    Args:
        csv_text: Sweep CSV (metrics schema).
        metrics: CSV columns to average over seeds.
    Returns:
        Dict mapping (variant, metric) to the series text, a "# x metric" header
        followed by one "x y" line per x value in increasing order.
    Raises:
        MissingColumns: If the CSV is empty or lacks a schema column.
    """
    df = read_metrics_frame(csv_text)
    x = series_axis(df)
    out: Dict[Tuple[str, str], str] = {}
    for variant in sorted(df["variant"].unique()):
        sub = df[df["variant"] == variant]
        means = sub.groupby(x, sort=True)[list(metrics)].mean()
        for metric in metrics:
            lines = [f"# {x} {metric}"]
            lines += [
                f"{FLOAT_FORMAT % xv} {FLOAT_FORMAT % yv}" for xv, yv in means[metric].items()
            ]
            out[(variant, metric)] = "\n".join(lines) + "\n"
    return out


def write_plot_data(
    csv_text: str, out_dir: Path, name: str, root: Path
) -> Dict[Tuple[str, str], Path]:
    """Writes every series as <out_dir>/<name>_<variant>_<metric>.dat under root."""
    paths: Dict[Tuple[str, str], Path] = {}
    for (variant, metric), text in emit_plot_data(csv_text).items():
        path = Path(out_dir) / f"{name}_{variant}_{metric}.dat"
        paths[(variant, metric)] = write_text_atomic(text, path, root)
    return paths

# Notes:
#   Safe I/O utilities to write sweep outputs strictly within an output root
#   (reports/ by default, configurable in config/experiments.yml).
#   Every write goes through a temporary file (.tmp) that is renamed atomically,
#   so an interrupted sweep never leaves a half-written CSV behind.
#
# Purpose:
#   To guarantee that experiment artefacts (metrics CSVs, NI-table dumps, plot
#   series, manifests) are only produced under the output hierarchy and are
#   byte-stable: CSV text is rendered once and written verbatim.

from __future__ import annotations

from pathlib import Path
from typing import Optional

import pandas as pd

# Default output root; sweeps may pass their own root
OUTPUT_ROOT = Path("reports")


def _is_under(path: Path, root: Path) -> bool:
    """
    Checks whether a given path lies inside root.
    Handles non-existent paths safely (only the resolved location matters).
    Args:
        path: The file path to check.
        root: The directory that must contain path.
    Returns:
        bool: True if path is under root, False otherwise.
    """
    root = root.resolve()
    resolved = path.resolve()
    return root in resolved.parents or resolved == root


def write_text_atomic(text: str, out_path: Path, root: Path = OUTPUT_ROOT) -> Path:
    """
    Safely writes text inside the output root.
        - Verifies that the path is under root.
        - Creates directories as needed.
        - Writes to a temporary .tmp file first, then renames atomically.
    Args:
        text: Content to write (written verbatim, "\\n" line endings kept).
        out_path: Destination path (must be under root).
        root: Output root directory.
    Returns:
        Path: The resolved destination path.
    """
    out_path = Path(out_path).resolve()
    if not _is_under(out_path, Path(root)):
        raise ValueError(f"[ERROR] Output outside of {root} not allowed: {out_path}")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    tmp = out_path.with_suffix(out_path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    tmp.replace(out_path)
    return out_path


def write_csv_atomic(
    df: pd.DataFrame,
    out_path: Path,
    root: Path = OUTPUT_ROOT,
    float_format: Optional[str] = None,
) -> Path:
    """
    Renders a DataFrame as CSV ("\\n" terminated rows, no index) and writes it
    atomically under the output root.
    Args:
        df: DataFrame to be saved.
        out_path: Destination path (must be under root).
        root: Output root directory.
        float_format: printf-style format of float columns (e.g. "%.6f").
    Returns:
        Path: The resolved destination path.
    """
    text = df.to_csv(index=False, float_format=float_format, lineterminator="\n")
    return write_text_atomic(text, out_path, root)

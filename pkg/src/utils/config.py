# Notes:
#   This module handles the structured loading and validation of the experiments
#   YAML file (config/experiments.yml). It converts each section into typed
#   dataclasses: the I/O directories of the sweeps and the named sweep presets
#   that reproduce the delivery-ratio and overhead experiments.
#
# Purpose:
#   To centralize experiment-level configuration (output and log directories,
#   sweep axes, variants, seeds, per-preset key overrides), automatically create
#   the output directories, and provide a single entry point for the CLI.
#   Per-run simulation parameters live in the KEY VALUE file parsed by
#   src.sim.config; presets only override some of its keys.

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import yaml

from src.utils.errors import InvalidConfig

# Data classes for each configuration section


@dataclass
class IOConfig:
    out_dir: Path  # Root of every sweep artefact (CSV, tables, series, manifests)
    logs_dir: Path  # Directory of run_lineage.jsonl


@dataclass
class PresetConfig:
    name: str
    description: str
    axis: Optional[str]  # ConfigFile key swept (e.g. "SELFISH-FRACTION"), None for one point
    values: List[str]  # Raw ConfigFile values of the axis
    variants: List[str]  # e.g. ["PDSR", "MDSR"]
    seeds: List[int]
    overrides: Dict[str, str] = field(default_factory=dict)  # KEY -> raw value
    keep_spacing: bool = False  # scale the terrain with NUMBER-OF-NODES


@dataclass
class ExperimentsConfig:
    io: IOConfig
    presets: Dict[str, PresetConfig]


# Helper functions


def _ensure_dirs(io_cfg: IOConfig):
    """
    Ensures that the output and log directories exist.
    Creates missing ones safely (idempotent).
    Args:
        io_cfg: IOConfig object with directory paths.
    Returns:
        None
    """
    for p in [io_cfg.out_dir, io_cfg.logs_dir]:
        p.mkdir(parents=True, exist_ok=True)


def _raw_value(v) -> str:
    # YAML booleans come back as bool; the KEY VALUE format spells them YES/NO
    if isinstance(v, bool):
        return "YES" if v else "NO"
    return str(v)


def _preset(name: str, raw: dict) -> PresetConfig:
    try:
        return PresetConfig(
            name=name,
            description=str(raw.get("description", "")),
            axis=raw.get("axis"),
            values=[_raw_value(v) for v in raw.get("values", [])],
            variants=[str(v).upper() for v in raw.get("variants", ["MDSR"])],
            seeds=[int(s) for s in raw.get("seeds", [1])],
            overrides={
                str(k).upper(): _raw_value(v) for k, v in (raw.get("overrides") or {}).items()
            },
            keep_spacing=bool(raw.get("keep_spacing", False)),
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise InvalidConfig(f"Malformed preset {name!r}: {exc}")


def load_config(
    path: str = "config/experiments.yml", ensure_dirs: bool = True
) -> ExperimentsConfig:
    """
    Loads the experiments configuration from a YAML file.
    Steps:
      1. Reads YAML safely.
      2. Creates typed dataclasses for each section.
      3. Ensures the output and log directories exist.
      4. Returns a fully initialized ExperimentsConfig instance.
    Args:
        path: Path to the YAML configuration file.
        ensure_dirs: Create the I/O directories (disabled by read-only callers).
    Returns:
        ExperimentsConfig: Fully populated configuration object.
    Raises:
        InvalidConfig: If a section is missing or malformed.
    """
    with open(path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}

    if "io" not in raw:
        raise InvalidConfig(f"Missing 'io' section in {path}")
    io_cfg = IOConfig(
        out_dir=Path(raw["io"].get("out_dir", "reports")),
        logs_dir=Path(raw["io"].get("logs_dir", "logs")),
    )
    if ensure_dirs:
        _ensure_dirs(io_cfg)

    presets = {name: _preset(name, p or {}) for name, p in (raw.get("presets") or {}).items()}
    return ExperimentsConfig(io=io_cfg, presets=presets)

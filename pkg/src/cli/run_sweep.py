# Notes:
#   Command-line entry point of the simulator. Builds the run configurations of a
#   sweep (one axis x variants x seeds), executes them sequentially or in a
#   process pool, and writes under the output root:
#     <out>/<name>.csv                 one metrics row per run
#     <out>/<name>_tables.csv          NI-table snapshots (--debug-tables)
#     <out>/<name>_transmissions.csv   per-node transmissions (--debug-tables)
#     <out>/series/<name>_*.dat        plot series (mean over seeds)
#     <out>/<name>_manifest.json       artefacts and parameter hash
#   A lineage record is appended to logs/run_lineage.jsonl.
#
#   Precedence of run parameters: CLI flags > --config file > preset overrides >
#   documented defaults.
#   Exit codes: 0 success, 1 run or I/O failure, 2 configuration error.
#
# Purpose:
#   To reproduce the delivery-ratio and overhead experiments as CSV series with
#   byte-identical outputs for identical invocations.

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.cli.plot_data import write_plot_data
from src.metrics.record import (
    FLOAT_FORMAT,
    MetricsRecord,
    emit_csv,
    tables_frame,
    transmissions_frame,
)
from src.sim.config import (
    SimConfig,
    Variant,
    apply_overrides,
    config_as_dict,
    read_config_items,
    validate_config,
)
from src.sim.engine import Simulation
from src.utils.config import load_config
from src.utils.errors import ConfigError, InvalidConfig, SimulationError
from src.utils.io_utils import write_csv_atomic, write_text_atomic
from src.utils.logging_utils import LOGS_DIR, hash_params, log_lineage

EXIT_OK, EXIT_RUN_FAILURE, EXIT_CONFIG_ERROR = 0, 1, 2


@dataclass(frozen=True)
class SweepSpec:
    name: str
    axis: Optional[str]  # ConfigFile key, None for a single point
    values: Tuple[str, ...]
    variants: Tuple[Variant, ...]
    seeds: Tuple[int, ...]
    keep_spacing: bool = False


@dataclass(frozen=True)
class SweepResult:
    records: List[MetricsRecord]
    csv_path: Path
    debug_paths: List[Path]  # NI tables and per-node transmissions (--debug-tables)
    series_paths: List[Path]
    manifest_path: Path


def _axis_order(values: Sequence[str]) -> List[str]:
    """Numeric axes are sorted by value, others keep the given order."""
    try:
        return sorted(values, key=float)
    except ValueError:
        return list(values)


def _spaced_terrain(base: SimConfig, node_count: int) -> str:
    m_base, m = math.isqrt(base.node_count), math.isqrt(node_count)
    if m_base < 2 or m < 2:
        raise InvalidConfig(f"Cannot keep grid spacing for {node_count} nodes")
    dx = base.terrain[0] / (m_base - 1)
    dy = base.terrain[1] / (m_base - 1)
    return f"({dx * (m - 1)!r}, {dy * (m - 1)!r})"


def sweep_points(base_items: Dict[str, str], spec: SweepSpec) -> List[SimConfig]:
    """
    Configurations of every run, ordered by axis value, then variant order, then
    seed. Each point is base_items plus VARIANT, SEED and the axis value.
    Raises:
        ConfigError: On unknown keys, malformed values or invalid points.
    """
    base = apply_overrides(SimConfig(), base_items)
    axis_values: List[Optional[str]] = _axis_order(spec.values) if spec.axis else [None]
    points: List[SimConfig] = []
    for value in axis_values:
        for variant in spec.variants:
            for seed in sorted(spec.seeds):
                items = dict(base_items)
                items["VARIANT"] = variant.value
                items["SEED"] = str(seed)
                if spec.axis is not None:
                    items[spec.axis.upper()] = value
                    if spec.keep_spacing and spec.axis.upper() == "NUMBER-OF-NODES":
                        items["TERRAIN-DIMENSIONS"] = _spaced_terrain(base, int(value))
                points.append(validate_config(apply_overrides(SimConfig(), items)))
    return points


def _run_point(config: SimConfig) -> Tuple[MetricsRecord, List[dict]]:
    sim = Simulation(config)
    record = sim.run()
    return record, sim.table_snapshots


def execute(configs: Sequence[SimConfig], jobs: int = 1) -> List[Tuple[MetricsRecord, List[dict]]]:
    """Runs every configuration; results keep the input order whatever jobs is."""
    if jobs <= 1:
        return [_run_point(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_point, configs))


_RUN_COLUMNS = ["variant", "selfish_pct", "node_count", "seed"]


def _per_run(frames: Sequence[pd.DataFrame], configs: Sequence[SimConfig]) -> pd.DataFrame:
    """Stacks one frame per run, each prefixed with the run's identifying columns."""
    tagged = []
    for df, cfg in zip(frames, configs):
        if df.empty:
            continue
        df = df.copy()
        df.insert(0, "seed", cfg.seed)
        df.insert(0, "node_count", cfg.node_count)
        df.insert(0, "selfish_pct", cfg.selfish_fraction * 100.0)
        df.insert(0, "variant", cfg.variant.value)
        tagged.append(df)
    if not tagged:
        extra = list(frames[0].columns) if frames else []
        return pd.DataFrame(columns=_RUN_COLUMNS + extra)
    return pd.concat(tagged, ignore_index=True)


def _write_debug_dumps(results, configs, out_dir: Path, name: str) -> List[Path]:
    tables = _per_run([tables_frame(s) for _, s in results], configs)
    energy = _per_run([transmissions_frame(r) for r, _ in results], configs)
    paths = [
        write_csv_atomic(tables, out_dir / f"{name}_tables.csv", out_dir, FLOAT_FORMAT),
        write_csv_atomic(energy, out_dir / f"{name}_transmissions.csv", out_dir, FLOAT_FORMAT),
    ]
    for p in paths:
        logging.info(f"[OUTPUT] Generated debug dump: {p}")
    return paths


def run_sweep(
    base_items: Dict[str, str],
    spec: SweepSpec,
    out_dir: Path,
    debug_tables: bool = False,
    jobs: int = 1,
    logs_dir: Path = LOGS_DIR,
) -> SweepResult:
    """
    Executes the cartesian product axis x variants x seeds and writes its outputs.
    Args:
        base_items: KEY -> raw value of the base configuration.
        spec: Sweep definition.
        out_dir: Output root; every artefact is written below it.
        debug_tables: Also dump the NI tables at every epoch writeback and the
            per-node transmission counts of every run.
        jobs: Worker processes (1 runs sequentially).
        logs_dir: Directory of the lineage log.
    Returns:
        SweepResult with the records (row order) and written paths.
    """
    out_dir = Path(out_dir)
    configs = sweep_points(base_items, spec)
    logging.info(f"[SWEEP] {spec.name}: {len(configs)} run(s), jobs={jobs}")
    results = execute(configs, jobs)
    records = [r for r, _ in results]

    csv_text = emit_csv(records, [spec.name] * len(records))
    csv_path = write_text_atomic(csv_text, out_dir / f"{spec.name}.csv", out_dir)
    logging.info(f"[OUTPUT] Generated: {csv_path}")

    debug_paths = _write_debug_dumps(results, configs, out_dir, spec.name) if debug_tables else []

    series = write_plot_data(csv_text, out_dir / "series", spec.name, out_dir)
    series_paths = [series[k] for k in sorted(series)]

    params = {
        "name": spec.name,
        "axis": spec.axis,
        "values": list(_axis_order(spec.values)) if spec.axis else [],
        "variants": [v.value for v in spec.variants],
        "seeds": sorted(spec.seeds),
        "keep_spacing": spec.keep_spacing,
        "base": config_as_dict(apply_overrides(SimConfig(), base_items)),
    }
    artefacts = [csv_path] + debug_paths + series_paths
    manifest = {
        "params": params,
        "params_hash": hash_params(params),
        "runs": len(records),
        "artifacts": [str(Path(p).resolve().relative_to(out_dir.resolve())) for p in artefacts],
    }
    manifest_path = write_text_atomic(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n",
        out_dir / f"{spec.name}_manifest.json",
        out_dir,
    )

    log_lineage(
        step="cli.run_sweep",
        params=params,
        inputs={"base_keys": ",".join(sorted(base_items))},
        outputs={"csv": str(csv_path), "manifest": str(manifest_path)},
        logs_dir=logs_dir,
    )
    logging.info("[LOGS] Logged sweep lineage record")
    return SweepResult(records, csv_path, debug_paths, series_paths, manifest_path)


# Argument handling


def _split(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _variants(text: str) -> Tuple[Variant, ...]:
    try:
        return tuple(Variant(v.upper()) for v in _split(text))
    except ValueError as exc:
        raise InvalidConfig(f"Unknown variant in {text!r} ({exc})")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="run_sweep",
        description="MANET retaliation-model simulator: runs sweeps and writes CSV series.",
    )
    p.add_argument("--config", type=Path, help="KEY VALUE simulation config file")
    p.add_argument("--experiments", type=Path, default=Path("config/experiments.yml"))
    p.add_argument("--preset", help="Named sweep of the experiments file (e.g. pdr_vs_selfish)")
    p.add_argument("--name", help="Sweep name used for output files")
    p.add_argument("--variant", help="Comma list of PDSR, MDSR, FGMDSR")
    p.add_argument("--selfish", help="Comma list of selfish percentages (sweep axis)")
    p.add_argument("--nodes", help="Comma list of node counts (sweep axis)")
    p.add_argument("--sweep", help="Generic axis KEY=v1,v2,... over any config key")
    p.add_argument("--keep-spacing", action="store_true", help="Scale terrain with --nodes")
    p.add_argument("--seeds", help="Comma list of seeds")
    p.add_argument("--out", type=Path, help="Output directory (default from experiments file)")
    p.add_argument("--debug-tables", action="store_true", help="Dump NI tables per epoch")
    p.add_argument("--jobs", type=int, default=1, help="Worker processes")
    p.add_argument("--verbose", action="store_true")
    return p


def resolve(args: argparse.Namespace) -> Tuple[Dict[str, str], SweepSpec, Path, Path]:
    """
    Combines preset, config file and flags into (base_items, spec, out_dir, logs_dir).
    Raises:
        ConfigError: On conflicting axes or bad values.
    """
    experiments = None
    if args.experiments is not None and Path(args.experiments).exists():
        experiments = load_config(str(args.experiments))

    preset = None
    if args.preset:
        if experiments is None or args.preset not in experiments.presets:
            raise InvalidConfig(f"Unknown preset {args.preset!r}")
        preset = experiments.presets[args.preset]

    items: Dict[str, str] = dict(preset.overrides) if preset else {}
    if args.config is not None:
        file_items, line_of = read_config_items(Path(args.config).read_text(encoding="utf-8"))
        apply_overrides(SimConfig(), file_items, line_of)  # reports bad keys with lines
        items.update(file_items)

    axis, values = (preset.axis, list(preset.values)) if preset else (None, [])
    keep_spacing = preset.keep_spacing if preset else False
    flag_axes = []
    if args.selfish:
        fractions = [repr(float(v) / 100.0) for v in _split(args.selfish)]
        flag_axes.append(("SELFISH-FRACTION", fractions))
    if args.nodes:
        flag_axes.append(("NUMBER-OF-NODES", _split(args.nodes)))
        keep_spacing = keep_spacing or args.keep_spacing
    if args.sweep:
        key, _, raw = args.sweep.partition("=")
        if not raw:
            raise InvalidConfig(f"--sweep expects KEY=v1,v2,... got {args.sweep!r}")
        flag_axes.append((key.strip().upper(), _split(raw)))
    if len(flag_axes) > 1:
        raise InvalidConfig("Only one sweep axis may be given")
    if flag_axes:
        axis, values = flag_axes[0]

    if args.variant:
        variants = _variants(args.variant)
    elif preset:
        variants = _variants(",".join(preset.variants))
    else:
        variants = (apply_overrides(SimConfig(), items).variant,)
    if axis == "VARIANT":
        variants = variants[:1]

    if args.seeds:
        seeds = tuple(int(s) for s in _split(args.seeds))
    elif preset:
        seeds = tuple(preset.seeds)
    else:
        seeds = (apply_overrides(SimConfig(), items).seed,)

    name = args.name or (preset.name if preset else "sweep")
    spec = SweepSpec(name, axis, tuple(values), variants, seeds, keep_spacing)
    out_dir = args.out or (experiments.io.out_dir if experiments else Path("reports"))
    logs_dir = experiments.io.logs_dir if experiments else LOGS_DIR
    return items, spec, Path(out_dir), Path(logs_dir)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s: %(message)s",
    )
    try:
        items, spec, out_dir, logs_dir = resolve(args)
        result = run_sweep(items, spec, out_dir, args.debug_tables, args.jobs, logs_dir)
    except ConfigError as exc:
        logging.error(str(exc))
        return EXIT_CONFIG_ERROR
    except ValueError as exc:
        # numeric flag values (--seeds, --selfish, --nodes)
        logging.error(f"[ERROR] {exc}")
        return EXIT_CONFIG_ERROR
    except (SimulationError, OSError) as exc:
        logging.error(str(exc))
        return EXIT_RUN_FAILURE
    logging.info(f"[COMPLETED] {len(result.records)} run(s) written to {out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

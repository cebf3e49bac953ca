# Quick simulator smoke test.
# Purpose:
# - Runs one short PDSR/MDSR pair on a small grid and prints the headline metrics.
#
# Notes:
# - This script is meant as a lightweight environment sanity check.
# - Useful before launching a full sweep to confirm numpy/pandas work together.

import time
from dataclasses import replace

import numpy as np
import pandas as pd

from src.metrics.record import emit_csv, total_overhead
from src.sim.config import MobilityConfig, SimConfig, Variant
from src.sim.engine import run

print("\n=== Simulator Smoke Test ===")
print(f"numpy version:  {np.__version__}")
print(f"pandas version: {pd.__version__}")

base = replace(
    SimConfig(),
    node_count=49,
    terrain=(750.0, 750.0),
    sim_time=60.0,
    protected_window=20.0,
    normal_window=10.0,
    mobility=MobilityConfig(pause=10.0),
    selfish_fraction=0.2,
)

records = []
for variant in (Variant.PDSR, Variant.MDSR):
    t0 = time.perf_counter()
    rec = run(replace(base, variant=variant))
    elapsed = time.perf_counter() - t0
    records.append(rec)
    status = "[OK]" if rec.is_conserved else "[WARN]"
    print(
        f"{status} {variant.value}: sent={rec.packets_sent} received={rec.packets_received} "
        f"pdr={rec.pdr:.3f} overhead={total_overhead(rec)} ({elapsed:.2f}s)"
    )

print()
print(emit_csv(records, ["smoke"] * len(records)))

# Notes:
#   Experiment outputs of a single run (MetricsRecord) and their CSV form.
#   The CSV schema is fixed: one header row, one row per run, the column order of
#   CSV_COLUMNS, reals with six decimals and "\n" row terminators, so identical
#   records always give byte-identical text.
#   Overhead counts transmissions: every rebroadcast of a control packet counts once.
#
# Purpose:
#   To be the only place where run counters turn into PDR / overhead numbers and
#   into text, for the sweeps, the plot series and the tests alike.

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import pandas as pd

from src.routing.packets import CONTROL_KINDS, PacketKind
from src.utils.errors import CountInversion, MetricsError, MissingColumns

DROP_CAUSES = ("selfish", "punishment", "no_route")

CSV_COLUMNS = [
    "label",
    "variant",
    "selfish_pct",
    "node_count",
    "seed",
    "sent",
    "received",
    "pdr",
    "rreq",
    "rrep",
    "rerr",
    "pfr_reports",
    "lbp_reports",
    "total_overhead",
    "drops_selfish",
    "drops_punishment",
    "drops_no_route",
]

TABLE_COLUMNS = ["epoch", "time", "node", "neighbor", "nprf", "npf", "grade", "bp"]

FLOAT_FORMAT = "%.6f"

# CSV column -> control packet kind
_CONTROL_COLUMNS = {
    "rreq": PacketKind.RREQ,
    "rrep": PacketKind.RREP,
    "rerr": PacketKind.RERR,
    "pfr_reports": PacketKind.PFR_REPORT,
    "lbp_reports": PacketKind.LBP_REPORT,
}


def compute_pdr(sent: int, received: int) -> float:
    """
    Packet delivery ratio received / sent, 1.0 when nothing was sent.
    Raises:
        CountInversion: If received > sent or a count is negative.
    """
    if sent < 0 or received < 0:
        raise CountInversion(f"[ERROR] Negative packet count (sent={sent}, received={received})")
    if received > sent:
        raise CountInversion(f"[ERROR] received ({received}) exceeds sent ({sent})")
    if sent == 0:
        return 1.0
    return received / sent


@dataclass(frozen=True)
class MetricsRecord:
    variant: str
    selfish_fraction: float
    node_count: int
    seed: int
    packets_sent: int
    packets_received: int
    control_packets: Mapping[PacketKind, int] = field(default_factory=dict)
    data_forwards: int = 0
    drops: Mapping[str, int] = field(default_factory=dict)
    per_node_transmissions: Mapping[int, int] = field(default_factory=dict)
    in_flight: int = 0

    @property
    def pdr(self) -> float:
        return compute_pdr(self.packets_sent, self.packets_received)

    def control(self, kind: PacketKind) -> int:
        return int(self.control_packets.get(kind, 0))

    def dropped(self, cause: str) -> int:
        return int(self.drops.get(cause, 0))

    @property
    def is_conserved(self) -> bool:
        """sent = received + every drop cause + in flight at the end."""
        lost = sum(self.dropped(c) for c in DROP_CAUSES)
        return self.packets_sent == self.packets_received + lost + self.in_flight


def total_overhead(record: MetricsRecord) -> int:
    """Sum of control transmissions of every kind, epoch reports included."""
    return sum(record.control(kind) for kind in CONTROL_KINDS)


def metrics_frame(records: Sequence[MetricsRecord], labels: Sequence[str]) -> pd.DataFrame:
    """
    One row per record in CSV_COLUMNS order.
    Raises:
        MetricsError: If records is empty or labels do not match records.
    """
    if not records:
        raise MetricsError("[ERROR] No metrics records to emit")
    if len(labels) != len(records):
        raise MetricsError(f"[ERROR] {len(labels)} labels for {len(records)} records")
    rows = []
    for label, r in zip(labels, records):
        row = {
            "label": label,
            "variant": r.variant,
            "selfish_pct": r.selfish_fraction * 100.0,
            "node_count": r.node_count,
            "seed": r.seed,
            "sent": r.packets_sent,
            "received": r.packets_received,
            "pdr": r.pdr,
        }
        row.update({col: r.control(kind) for col, kind in _CONTROL_COLUMNS.items()})
        row["total_overhead"] = total_overhead(r)
        row.update({f"drops_{c}": r.dropped(c) for c in DROP_CAUSES})
        rows.append(row)
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def render_frame(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def emit_csv(records: Sequence[MetricsRecord], labels: Sequence[str]) -> str:
    """
    Renders records as CSV text (header + one row per record).
    Args:
        records: Non-empty list of run records.
        labels: One label per record (e.g. the sweep name).
    Returns:
        str: Newline-terminated CSV text.
    """
    return render_frame(metrics_frame(records, labels))


def read_metrics_frame(text: str) -> pd.DataFrame:
    """
    Parses CSV text with the metrics schema.
    Raises:
        MissingColumns: If the header or the body is missing, or a column lacks.
    """
    if not text.strip():
        raise MissingColumns("[ERROR] Empty metrics CSV")
    df = pd.read_csv(io.StringIO(text), dtype={"label": str, "variant": str})
    missing = [c for c in CSV_COLUMNS if c not in df.columns]
    if missing:
        raise MissingColumns(f"[ERROR] Metrics CSV lacks columns: {missing}")
    if df.empty:
        raise MissingColumns("[ERROR] Metrics CSV has a header but no rows")
    return df


def parse_csv(text: str) -> Tuple[List[MetricsRecord], List[str]]:
    """
    Inverse of emit_csv for the columns the CSV carries. Per-node counts and
    DATA forwards are not part of the schema and come back empty; in_flight is
    recovered from the conservation identity.
    Returns:
        (records, labels) in row order.
    """
    df = read_metrics_frame(text)
    records: List[MetricsRecord] = []
    for row in df.itertuples(index=False):
        drops = {c: int(getattr(row, f"drops_{c}")) for c in DROP_CAUSES}
        sent, received = int(row.sent), int(row.received)
        records.append(
            MetricsRecord(
                variant=str(row.variant),
                selfish_fraction=float(row.selfish_pct) / 100.0,
                node_count=int(row.node_count),
                seed=int(row.seed),
                packets_sent=sent,
                packets_received=received,
                control_packets={
                    kind: int(getattr(row, col)) for col, kind in _CONTROL_COLUMNS.items()
                },
                drops=drops,
                in_flight=sent - received - sum(drops.values()),
            )
        )
    return records, [str(x) for x in df["label"]]


def tables_frame(rows: Iterable[Mapping[str, object]]) -> pd.DataFrame:
    """NI-table snapshots (one row per node, neighbour and epoch) as a DataFrame."""
    return pd.DataFrame(list(rows), columns=TABLE_COLUMNS)


def transmissions_frame(record: MetricsRecord) -> pd.DataFrame:
    """Per-node transmission counts (energy proxy), ordered by node id."""
    items: Dict[int, int] = dict(sorted(record.per_node_transmissions.items()))
    return pd.DataFrame({"node": list(items), "transmissions": list(items.values())})

# Notes:
#   Pure, deterministic state transformations of the retaliation reputation
#   pipeline: neighbour observation counters -> packet forwarding ratio (PFR) ->
#   Grade -> local bonus points (LBP) -> bonus points (BP), plus the punishment
#   ledger (BP consumption). Nothing here knows about the event loop; every
#   operation takes immutable values and returns new ones.
#
# Purpose:
#   To keep the reputation arithmetic in one place for the simulator and the tests.
#   Half-up rounding goes through Decimal (0.72 -> 0.7, 0.76 -> 0.8, 2.5 -> 3).

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.utils.errors import (
    CounterViolation,
    DuplicateNode,
    EmptySamples,
    NoPunishmentPending,
)

NodeId = int
PfrReport = Tuple[NodeId, float]
LbpReport = Tuple[NodeId, int]


class LbpFunction(str, Enum):
    LINEAR = "LINEAR"
    EXPONENTIAL = "EXPONENTIAL"


class BpRounding(str, Enum):
    HALF_UP = "HALF_UP"


@dataclass(frozen=True)
class PunishmentConfig:
    lbp_function: LbpFunction = LbpFunction.LINEAR
    grade_rounding: int = 1  # decimal places kept in a Grade
    bp_rounding: BpRounding = BpRounding.HALF_UP


@dataclass(frozen=True)
class ObservationCounters:
    nprf: int = 0  # packets received for forwarding
    npf: int = 0  # packets forwarded


@dataclass(frozen=True)
class NITableEntry:
    node_id: NodeId
    counters: ObservationCounters = ObservationCounters()
    grade: float = 1.0
    bp: int = 0


@dataclass(frozen=True)
class TempTableEntry:
    node_id: NodeId
    pfr_samples: Tuple[float, ...] = ()
    grade: float = 1.0
    lbp_samples: Tuple[int, ...] = ()


NITable = Dict[NodeId, NITableEntry]
TempTable = Dict[NodeId, TempTableEntry]


def _half_up(value: Decimal, places: int = 0) -> Decimal:
    return value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def _dec(x: float) -> Decimal:
    # str() keeps the shortest repr, so 0.7 is exactly Decimal("0.7")
    return Decimal(str(x))


# Observation (promiscuous overhearing)


def record_received_for_forwarding(entry: NITableEntry) -> NITableEntry:
    """
    Counts one packet the neighbour received for forwarding.
    Counting only happens while no punishment is pending (bp == 0); with bp > 0
    the later drop observation consumes BP instead.
    """
    if entry.bp > 0:
        return entry
    c = entry.counters
    return replace(entry, counters=replace(c, nprf=c.nprf + 1))


def record_forwarded(entry: NITableEntry) -> NITableEntry:
    """
    Counts one packet the neighbour was overheard forwarding (gated like NPRF).
    Raises:
        CounterViolation: If NPF would exceed NPRF.
    """
    if entry.bp > 0:
        return entry
    c = entry.counters
    if c.npf + 1 > c.nprf:
        raise CounterViolation(
            f"[ERROR] npf would exceed nprf for node {entry.node_id} "
            f"(nprf={c.nprf}, npf={c.npf})"
        )
    return replace(entry, counters=replace(c, npf=c.npf + 1))


def observe_sanctioned_drop(entry: NITableEntry) -> NITableEntry:
    """
    Consumes one bonus point after a sanctioned drop; counters stay untouched.
    Raises:
        NoPunishmentPending: If the entry has no BP left.
    """
    if entry.bp <= 0:
        raise NoPunishmentPending(
            f"[ERROR] No punishment pending for node {entry.node_id}"
        )
    return replace(entry, bp=entry.bp - 1)


# Aggregation


def compute_pfr(counters: ObservationCounters) -> float:
    """NPF / NPRF, or 1.0 when nothing was observed (unknown nodes are honest)."""
    if counters.nprf == 0:
        return 1.0
    return counters.npf / counters.nprf


def aggregate_grade(
    pfr_samples: Sequence[float], config: PunishmentConfig = PunishmentConfig()
) -> float:
    """
    Mean of the PFR samples, rounded half-up to config.grade_rounding places.
    Raises:
        EmptySamples: If no sample was collected.
    """
    if not pfr_samples:
        raise EmptySamples("[ERROR] Cannot grade a node without PFR samples")
    mean = sum((_dec(s) for s in pfr_samples), Decimal(0)) / len(pfr_samples)
    grade = float(_half_up(mean, config.grade_rounding))
    return min(1.0, max(0.0, grade))


def compute_lbp(grade: float, config: PunishmentConfig = PunishmentConfig()) -> int:
    """
    Local bonus points from the misbehaviour gain MG = 1 - grade.
      LINEAR:      round(MG * 10)
      EXPONENTIAL: round(2 ** (MG * 10)) - 1, never below zero
    """
    scaled = (Decimal(1) - _dec(grade)) * 10
    if config.lbp_function is LbpFunction.LINEAR:
        return max(0, int(_half_up(scaled)))
    power = Decimal(2) ** scaled
    return max(0, int(_half_up(power)) - 1)


def aggregate_bp(lbp_samples: Sequence[int]) -> int:
    """
    Mean of the LBP samples rounded half-up to an integer.
    Raises:
        EmptySamples: If no sample was collected.
    """
    if not lbp_samples:
        raise EmptySamples("[ERROR] Cannot compute BP without LBP samples")
    mean = Decimal(sum(lbp_samples)) / len(lbp_samples)
    return max(0, int(_half_up(mean)))


# Epoch processing


def finalize_epoch_phase1(
    local_counters: Mapping[NodeId, ObservationCounters],
) -> List[PfrReport]:
    """One (subject, pfr) payload per neighbour, ordered by node id."""
    return [(node, compute_pfr(local_counters[node])) for node in sorted(local_counters)]


def open_temp_table(own_reports: Iterable[PfrReport]) -> TempTable:
    """Starts a Temp table whose first PFR sample per subject is the node's own."""
    return {node: TempTableEntry(node, pfr_samples=(pfr,)) for node, pfr in own_reports}


def ingest_pfr_report(
    temp: TempTable, report: PfrReport, my_neighbors: Iterable[NodeId]
) -> TempTable:
    """
    Appends a neighbour's PFR observation about subject_id, keeping only subjects
    that are neighbours of this node and already carry its own sample from
    phase 1. Duplicates are appended as they come.
    """
    subject, pfr = report
    if subject not in temp or subject not in set(my_neighbors):
        return temp
    entry = temp[subject]
    out = dict(temp)
    out[subject] = replace(entry, pfr_samples=entry.pfr_samples + (pfr,))
    return out


def finalize_epoch_phase2(
    temp: TempTable, config: PunishmentConfig = PunishmentConfig()
) -> Tuple[List[LbpReport], TempTable]:
    """
    Grades every subject of the Temp table and assigns its local bonus points.
    Returns the (subject, lbp) payloads to broadcast and the updated Temp table,
    whose lbp_samples now start with this node's own LBP.
    Raises:
        EmptySamples: If a subject has no PFR sample.
    """
    reports: List[LbpReport] = []
    out: TempTable = {}
    for subject in sorted(temp):
        entry = temp[subject]
        grade = aggregate_grade(entry.pfr_samples, config)
        lbp = compute_lbp(grade, config)
        out[subject] = replace(entry, grade=grade, lbp_samples=(lbp,))
        reports.append((subject, lbp))
    return reports, out


def ingest_lbp_report(temp: TempTable, report: LbpReport) -> TempTable:
    """Appends a neighbour's LBP for a subject already graded in this Temp table."""
    subject, lbp = report
    entry = temp.get(subject)
    if entry is None:
        return temp
    out = dict(temp)
    out[subject] = replace(entry, lbp_samples=entry.lbp_samples + (lbp,))
    return out


def finalize_epoch_phase3(temp: TempTable, ni: NITable) -> NITable:
    """
    Writes Grade and BP back into the NI table. BP replaces any residual value
    from the previous epoch; counters of every entry restart at zero.
    The caller drops its Temp table afterwards.
    """
    out: NITable = {
        node: replace(entry, counters=ObservationCounters()) for node, entry in ni.items()
    }
    for subject, t in temp.items():
        base = out.get(subject, NITableEntry(subject))
        bp = aggregate_bp(t.lbp_samples) if t.lbp_samples else 0
        out[subject] = replace(base, grade=t.grade, bp=bp)
    return out


# Admission


def admit_new_node(
    node_id: NodeId, ni: Optional[Mapping[NodeId, NITableEntry]] = None
) -> NITableEntry:
    """
    Default entry for an unknown node: counters and BP at zero, grade one.
    Raises:
        DuplicateNode: If node_id already has an entry in ni.
    """
    if ni is not None and node_id in ni:
        raise DuplicateNode(f"[ERROR] Node {node_id} already in NI table")
    return NITableEntry(node_id)

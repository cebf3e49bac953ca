# Notes:
#   Deterministic discrete-event simulation of a MANET running DSR, optionally with
#   the retaliation model (MDSR) and friendly-group scoped discovery (FGMDSR).
#
#   - Events live in a heap ordered by (time, sequence number); the sequence
#     number is the insertion order, so ties are resolved deterministically.
#   - Four independent numpy streams are spawned from the seed: mobility,
#     traffic, selfish selection and selfish drop decisions. Routing variants
#     never draw from them differently, which keeps PDSR and MDSR runs aligned.
#   - A transmission reaches every current unit-disk neighbour of the sender
#     after HOP_DELAY; a unicast is received by its next hop only, and overheard
#     by the others. Handlers forward at once, inside the delivery event.
#   - Global mode cycle: Protected for protected_window, then Normal for
#     normal_window. The three epoch phases sit one broadcast round apart just
#     before each Protected window ends.
#   - Observation: when a node B receives a DATA packet it has to forward while
#     the network is Protected, every neighbour of B registers it (NPRF, unless
#     punishment is pending) and waits forward_timeout for B's retransmission.
#     B's own punishment and isolation drops are not observed. Phase 1 reports
#     only the neighbours observed during the window.
#
# Purpose:
#   To tie mobility, radio, routing, reputation and workload together and to
#   produce one MetricsRecord per run, bit-identical for identical configs.

from __future__ import annotations

import heapq
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Set, Tuple

import numpy as np

from src.metrics.record import MetricsRecord
from src.reputation.engine import (
    NITable,
    TempTable,
    admit_new_node,
    finalize_epoch_phase1,
    finalize_epoch_phase2,
    finalize_epoch_phase3,
    ingest_lbp_report,
    ingest_pfr_report,
    observe_sanctioned_drop,
    open_temp_table,
    record_forwarded,
    record_received_for_forwarding,
)
from src.routing.dsr import (
    Action,
    RouteCache,
    Verdict,
    forward_data,
    handle_rerr,
    handle_rrep,
    handle_rreq,
    make_rerr,
    originate_rreq,
    retaliation_filter,
    select_route,
)
from src.routing.friendly_groups import GroupAssignment, partition, same_group, scope_flood
from src.routing.packets import NodeId, Packet, PacketKind
from src.sim.behavior import choose_selfish_nodes, generate_traffic, selfish_decision
from src.sim.config import (
    BROADCAST_ROUND,
    HONEST,
    BehaviorProfile,
    FlowScope,
    SimConfig,
    Variant,
    validate_config,
)
from src.sim.mobility import init_waypoints, place_grid, step_random_waypoint
from src.sim.radio import neighbors

logger = logging.getLogger(__name__)

HOP_DELAY = 0.002  # s per transmission

# DSR send buffer and discovery retries
SEND_BUFFER_SIZE = 64
SEND_BUFFER_TIMEOUT = 30.0  # s
RREQ_INITIAL_BACKOFF = 0.5  # s
RREQ_MAX_BACKOFF = 10.0  # s
RREQ_MAX_RETRIES = 16

# broadcasts confined by friendly groups
_SCOPED_KINDS = (PacketKind.RREQ, PacketKind.PFR_REPORT, PacketKind.LBP_REPORT)


class EventKind(str, Enum):
    DELIVER = "DELIVER"
    MOBILITY_STEP = "MOBILITY_STEP"
    MODE_SWITCH = "MODE_SWITCH"
    EPOCH_PHASE = "EPOCH_PHASE"
    TRAFFIC_GEN = "TRAFFIC_GEN"
    FORWARD_TIMEOUT = "FORWARD_TIMEOUT"
    ROUTE_REQUEST_TIMEOUT = "ROUTE_REQUEST_TIMEOUT"


class Mode(str, Enum):
    PROTECTED = "PROTECTED"
    NORMAL = "NORMAL"


@dataclass(order=True)
class Event:
    time: float
    seq: int
    kind: EventKind = field(compare=False)
    payload: Any = field(compare=False, default=None)


@dataclass
class _Discovery:
    request_id: int
    retries: int = 0
    backoff: float = RREQ_INITIAL_BACKOFF


@dataclass
class NodeState:
    id: NodeId
    behavior: BehaviorProfile = HONEST
    group_id: int = 0
    ni_table: NITable = field(default_factory=dict)
    temp_table: Optional[TempTable] = None
    route_cache: RouteCache = field(default_factory=RouteCache)
    seen: Set[Tuple[NodeId, int]] = field(default_factory=set)
    next_request_id: int = 0
    send_buffer: List[Tuple[float, Packet]] = field(default_factory=list)
    discoveries: Dict[NodeId, _Discovery] = field(default_factory=dict)


@dataclass(frozen=True)
class PunishmentRecord:
    time: float
    punisher: NodeId
    subject: NodeId
    kind: PacketKind


@dataclass(frozen=True)
class WritebackRecord:
    time: float
    observer: NodeId
    subject: NodeId
    bp: int


def mode_schedule(config: SimConfig) -> List[Tuple[float, EventKind, Any]]:
    """
    Mode cycle of the run as (time, kind, payload) triples, in time order.
    For every Protected window [s, e) with e = s + protected_window:
      EPOCH_PHASE (epoch, 1|2|3) at e - 3r, e - 2r, e - r (r = BROADCAST_ROUND),
      MODE_SWITCH NORMAL at e, MODE_SWITCH PROTECTED at e + normal_window.
    Only entries strictly before sim_time are returned; the run starts Protected.
    """
    out: List[Tuple[float, EventKind, Any]] = []
    period = config.protected_window + config.normal_window
    epoch = 0
    start = 0.0
    while start < config.sim_time:
        end = start + config.protected_window
        for phase in (1, 2, 3):
            out.append((end - (4 - phase) * BROADCAST_ROUND, EventKind.EPOCH_PHASE, (epoch, phase)))
        out.append((end, EventKind.MODE_SWITCH, Mode.NORMAL))
        out.append((end + config.normal_window, EventKind.MODE_SWITCH, Mode.PROTECTED))
        epoch += 1
        start = epoch * period
    return [e for e in out if e[0] < config.sim_time]


class Simulation:
    """One run of the simulator for a validated SimConfig."""

    def __init__(self, config: SimConfig):
        self.config = validate_config(config)
        cfg = self.config
        self.now = 0.0
        self.mode = Mode.PROTECTED
        self._queue: List[Event] = []
        self._seq = 0

        mobility_ss, traffic_ss, selfish_ss, drops_ss = np.random.SeedSequence(cfg.seed).spawn(4)
        self._mobility_rng = np.random.default_rng(mobility_ss)
        self._traffic_rng = np.random.default_rng(traffic_ss)
        self._drop_rng = np.random.default_rng(drops_ss)

        self.waypoints = init_waypoints(place_grid(cfg.node_count, cfg.terrain), cfg.mobility)
        self.adjacency = neighbors(self.waypoints.positions, cfg.radio_range)

        self.selfish = choose_selfish_nodes(
            cfg.node_count, cfg.selfish_fraction, np.random.default_rng(selfish_ss)
        )
        layout: Optional[GroupAssignment] = None
        if cfg.variant is Variant.FGMDSR or cfg.traffic.scope is FlowScope.GROUP:
            layout = partition(
                self.waypoints.positions, cfg.terrain, cfg.group_count, self.adjacency
            )
        # group-scoped traffic is the same in every variant; only FGMDSR scopes floods
        self.groups = layout if cfg.variant is Variant.FGMDSR else None
        self.nodes: List[NodeState] = [
            NodeState(
                id=i,
                behavior=cfg.selfish_profile if i in self.selfish else HONEST,
                group_id=self.groups.group_of[i] if self.groups else 0,
            )
            for i in range(cfg.node_count)
        ]
        self.reputation = cfg.uses_reputation
        self.grade_threshold = cfg.grade_threshold if self.reputation else None
        if self.reputation:
            for node in self.nodes:
                self._admit_neighbors(node)

        # metrics
        self.sent = 0
        self.received = 0
        self.data_forwards = 0
        self.control = Counter()
        self.drops = Counter()
        self.transmissions = Counter()
        self._live: Set[int] = set()
        self._next_payload = 0

        # auditing
        self.ledger: List[PunishmentRecord] = []
        self.writebacks: List[WritebackRecord] = []
        self.table_snapshots: List[Dict[str, Any]] = []

        # (forwarder, payload_id) -> {observer: counted}
        self._pending: Dict[Tuple[NodeId, int], Dict[NodeId, bool]] = {}

        self.flows = generate_traffic(cfg, self._traffic_rng, layout.group_of if layout else None)
        for idx, flow in enumerate(self.flows):
            self._schedule_at(flow.send_time(0), EventKind.TRAFFIC_GEN, (idx, 0))
        if not cfg.mobility.is_static:
            self._schedule_at(cfg.mobility.update_interval, EventKind.MOBILITY_STEP)
        if self.reputation:
            for time, kind, payload in mode_schedule(cfg):
                self._schedule_at(time, kind, payload)

        self._handlers: Dict[EventKind, Callable[[Any], None]] = {
            EventKind.DELIVER: self._on_deliver,
            EventKind.MOBILITY_STEP: self._on_mobility_step,
            EventKind.MODE_SWITCH: self._on_mode_switch,
            EventKind.EPOCH_PHASE: self._on_epoch_phase,
            EventKind.TRAFFIC_GEN: self._on_traffic,
            EventKind.FORWARD_TIMEOUT: self.observation_timeout,
            EventKind.ROUTE_REQUEST_TIMEOUT: self._on_route_request_timeout,
        }

    # Scheduling

    def _schedule_at(self, time: float, kind: EventKind, payload: Any = None) -> None:
        if time >= self.config.sim_time:
            return
        heapq.heappush(self._queue, Event(time, self._seq, kind, payload))
        self._seq += 1

    def run(self) -> MetricsRecord:
        """Processes events in (time, seq) order until the queue is exhausted."""
        logger.debug(
            f"[RUN] {self.config.variant.value} N={self.config.node_count} "
            f"selfish={len(self.selfish)} seed={self.config.seed}"
        )
        while self._queue:
            event = heapq.heappop(self._queue)
            self.now = event.time
            self._handlers[event.kind](event.payload)
        return self.metrics()

    def metrics(self) -> MetricsRecord:
        cfg = self.config
        return MetricsRecord(
            variant=cfg.variant.value,
            selfish_fraction=cfg.selfish_fraction,
            node_count=cfg.node_count,
            seed=cfg.seed,
            packets_sent=self.sent,
            packets_received=self.received,
            control_packets=dict(self.control),
            data_forwards=self.data_forwards,
            drops=dict(self.drops),
            per_node_transmissions={i: self.transmissions[i] for i in range(cfg.node_count)},
            in_flight=len(self._live),
        )

    # Radio

    def transmit(self, sender: NodeId, pkt: Packet, next_hop: Optional[NodeId] = None) -> int:
        """
        Sends pkt from sender to its neighbours (broadcast) or to next_hop.
        Counts the transmission, settles pending observations of sender
        forwarding this DATA, and schedules one DELIVER per receiver.
        Returns:
            int: Number of deliveries scheduled.
        """
        self.transmissions[sender] += 1
        if pkt.kind is PacketKind.DATA:
            self.data_forwards += 1
            self._overhear_forward(sender, pkt)
        else:
            self.control[pkt.kind] += 1

        in_range = self.adjacency[sender]
        if next_hop is not None:
            receivers = [next_hop] if next_hop in in_range else []
        elif self.groups is not None and pkt.kind in _SCOPED_KINDS:
            if pkt.kind is PacketKind.RREQ:
                admissible = scope_flood(pkt, self.groups)
            else:
                admissible = same_group(self.groups)
            receivers = [r for r in in_range if admissible(sender, r)]
        else:
            receivers = list(in_range)
        for r in receivers:
            self._schedule_at(self.now + HOP_DELAY, EventKind.DELIVER, (sender, r, pkt))
        return len(receivers)

    # Observation

    def _observing(self) -> bool:
        if not (self.reputation and self.config.promiscuous and self.mode is Mode.PROTECTED):
            return False
        cfg = self.config
        period = cfg.protected_window + cfg.normal_window
        cycle_start = (self.now // period) * period
        phase1 = cycle_start + cfg.protected_window - 3 * BROADCAST_ROUND
        return self.now + cfg.forward_timeout < phase1

    def _arm_observation(self, forwarder: NodeId, pkt: Packet) -> None:
        key = (forwarder, pkt.payload_id)
        watchers: Dict[NodeId, bool] = {}
        for observer in self.adjacency[forwarder]:
            ni = self.nodes[observer].ni_table
            if forwarder not in ni:
                ni[forwarder] = admit_new_node(forwarder, ni)
            entry = ni[forwarder]
            counted = entry.bp == 0
            ni[forwarder] = record_received_for_forwarding(entry)
            watchers[observer] = counted
        if watchers:
            self._pending[key] = watchers
            self._schedule_at(
                self.now + self.config.forward_timeout, EventKind.FORWARD_TIMEOUT, key
            )

    def _overhear_forward(self, sender: NodeId, pkt: Packet) -> None:
        watchers = self._pending.pop((sender, pkt.payload_id), None)
        if watchers is None:
            return
        in_range = set(self.adjacency[sender])
        for observer, counted in watchers.items():
            if counted and observer in in_range:
                ni = self.nodes[observer].ni_table
                ni[sender] = record_forwarded(ni[sender])

    def observation_timeout(self, key: Tuple[NodeId, int]) -> None:
        """
        Settles the observations of forwarder key[0] for payload key[1] that were
        not matched by a retransmission: counted observers keep NPRF without NPF,
        observers with pending punishment consume one BP for the drop.
        """
        watchers = self._pending.pop(key, None)
        if watchers is None:
            return
        forwarder = key[0]
        for observer, counted in watchers.items():
            ni = self.nodes[observer].ni_table
            entry = ni.get(forwarder)
            if not counted and entry is not None and entry.bp > 0:
                ni[forwarder] = observe_sanctioned_drop(entry)

    # Packet delivery

    def _on_deliver(self, payload: Tuple[NodeId, NodeId, Packet]) -> None:
        self.deliver(*payload)

    def deliver(self, sender: NodeId, receiver: NodeId, pkt: Packet) -> None:
        """Hands pkt, sent by sender, to the receiver's protocol handler."""
        handler = {
            PacketKind.RREQ: self._recv_rreq,
            PacketKind.RREP: self._recv_rrep,
            PacketKind.RERR: self._recv_rerr,
            PacketKind.DATA: self._recv_data,
            PacketKind.PFR_REPORT: self._recv_pfr_report,
            PacketKind.LBP_REPORT: self._recv_lbp_report,
        }[pkt.kind]
        handler(self.nodes[receiver], pkt)

    def _handles_control(self, node: NodeState, pkt: Packet) -> bool:
        return selfish_decision(node.behavior, pkt, self._drop_rng)

    def _record_punishment(self, node: NodeState, action: Action, pkt: Packet) -> None:
        self.ledger.append(PunishmentRecord(self.now, node.id, action.punished, pkt.kind))

    def _recv_rreq(self, node: NodeState, pkt: Packet) -> None:
        if node.id != pkt.destination and not self._handles_control(node, pkt):
            return
        action = handle_rreq(node.id, pkt, node.ni_table, node.seen, self.grade_threshold)
        if action.verdict is Verdict.PUNISH:
            self._record_punishment(node, action, pkt)
        elif action.verdict is Verdict.REPLY:
            self.transmit(node.id, action.packet, action.next_hop)
        elif action.verdict is Verdict.FORWARD:
            self.transmit(node.id, action.packet)

    def _recv_rrep(self, node: NodeState, pkt: Packet) -> None:
        if node.id != pkt.destination and not self._handles_control(node, pkt):
            return
        action = handle_rrep(
            node.id, pkt, node.ni_table, node.route_cache, self.grade_threshold
        )
        if action.verdict is Verdict.PUNISH:
            self._record_punishment(node, action, pkt)
        elif action.verdict is Verdict.CACHED:
            node.discoveries.pop(pkt.origin, None)
            self._flush_send_buffer(node, pkt.origin)
        elif action.verdict is Verdict.FORWARD:
            self.transmit(node.id, action.packet, action.next_hop)

    def _recv_rerr(self, node: NodeState, pkt: Packet) -> None:
        if node.id != pkt.destination and not self._handles_control(node, pkt):
            return
        action = handle_rerr(node.id, pkt, node.ni_table, node.route_cache)
        if action.verdict is Verdict.PUNISH:
            self._record_punishment(node, action, pkt)
        elif action.verdict is Verdict.FORWARD:
            self.transmit(node.id, action.packet, action.next_hop)

    def _recv_data(self, node: NodeState, pkt: Packet) -> None:
        if node.id == pkt.destination:
            self.received += 1
            self._live.discard(pkt.payload_id)
            return
        # sanctioned drops (punishment, isolation) are never observed
        action = retaliation_filter(node.id, pkt, node.ni_table)
        if action.verdict is Verdict.PUNISH:
            self._record_punishment(node, action, pkt)
            self._drop(pkt, "punishment")
            return
        if not selfish_decision(node.behavior, pkt, self._drop_rng):
            self._observe_receipt(node, pkt)
            self._drop(pkt, "selfish")
            return

        action = forward_data(
            node.id, pkt, self.adjacency[node.id], node.ni_table, self.grade_threshold
        )
        if action.verdict is Verdict.ISOLATE:
            node.route_cache.evict_node(action.next_hop)
            self._drop(pkt, "no_route")
            self._send_rerr(node, pkt, action.next_hop, isolated=True)
            return
        self._observe_receipt(node, pkt)
        # a broken link is only detected after the frame went out (and was overheard)
        self.transmit(node.id, action.packet, action.next_hop)
        if action.verdict is Verdict.LINK_BROKEN:
            node.route_cache.evict_link(node.id, action.next_hop)
            self._drop(pkt, "no_route")
            self._send_rerr(node, pkt, action.next_hop)

    def _observe_receipt(self, node: NodeState, pkt: Packet) -> None:
        if self._observing():
            self._arm_observation(node.id, pkt)

    def _send_rerr(
        self, node: NodeState, pkt: Packet, unreachable: NodeId, isolated: bool = False
    ) -> None:
        rerr = make_rerr(node.id, pkt, unreachable, isolated)
        if len(rerr.route) < 2:
            return
        self.transmit(node.id, replace(rerr, hop_index=1), rerr.route[1])

    def _drop(self, pkt: Packet, cause: str) -> None:
        self.drops[cause] += 1
        self._live.discard(pkt.payload_id)

    # Epoch reports

    def _recv_pfr_report(self, node: NodeState, pkt: Packet) -> None:
        if node.temp_table is None:
            return
        for report in pkt.report:
            node.temp_table = ingest_pfr_report(node.temp_table, report, node.ni_table)

    def _recv_lbp_report(self, node: NodeState, pkt: Packet) -> None:
        if node.temp_table is None:
            return
        for report in pkt.report:
            node.temp_table = ingest_lbp_report(node.temp_table, report)

    def _admit_neighbors(self, node: NodeState) -> None:
        for other in self.adjacency[node.id]:
            if other not in node.ni_table:
                node.ni_table[other] = admit_new_node(other, node.ni_table)

    def _on_epoch_phase(self, payload: Tuple[int, int]) -> None:
        epoch, phase = payload
        if phase == 1:
            for node in self.nodes:
                self._admit_neighbors(node)
                # neighbours without evidence this window keep their grade and BP
                reports = finalize_epoch_phase1(
                    {n: e.counters for n, e in node.ni_table.items() if e.counters.nprf > 0}
                )
                node.temp_table = open_temp_table(reports)
                if reports:
                    self.transmit(
                        node.id,
                        Packet(PacketKind.PFR_REPORT, origin=node.id, report=tuple(reports)),
                    )
        elif phase == 2:
            for node in self.nodes:
                reports, node.temp_table = finalize_epoch_phase2(
                    node.temp_table or {}, self.config.punishment
                )
                if reports:
                    self.transmit(
                        node.id,
                        Packet(PacketKind.LBP_REPORT, origin=node.id, report=tuple(reports)),
                    )
        else:
            for node in self.nodes:
                self._writeback(node, epoch)
            logger.debug(f"[RUN] epoch {epoch} written back at t={self.now:.3f}")

    def _writeback(self, node: NodeState, epoch: int) -> None:
        temp = node.temp_table or {}
        before = node.ni_table
        node.ni_table = finalize_epoch_phase3(temp, before)
        node.temp_table = None
        for subject in sorted(node.ni_table):
            entry = node.ni_table[subject]
            observed = before.get(subject, entry).counters
            self.table_snapshots.append(
                {
                    "epoch": epoch,
                    "time": self.now,
                    "node": node.id,
                    "neighbor": subject,
                    "nprf": observed.nprf,
                    "npf": observed.npf,
                    "grade": entry.grade,
                    "bp": entry.bp,
                }
            )
            if subject in temp:
                self.writebacks.append(WritebackRecord(self.now, node.id, subject, entry.bp))

    # Mobility and mode

    def _on_mobility_step(self, _: Any) -> None:
        cfg = self.config
        self.waypoints = step_random_waypoint(
            self.waypoints,
            cfg.mobility.update_interval,
            self._mobility_rng,
            cfg.mobility,
            cfg.terrain,
        )
        self.adjacency = neighbors(self.waypoints.positions, cfg.radio_range)
        self._schedule_at(self.now + cfg.mobility.update_interval, EventKind.MOBILITY_STEP)

    def _on_mode_switch(self, mode: Mode) -> None:
        self.mode = mode

    # Traffic and route discovery

    def _on_traffic(self, payload: Tuple[int, int]) -> None:
        idx, k = payload
        flow = self.flows[idx]
        pkt = Packet(
            PacketKind.DATA,
            origin=flow.source,
            destination=flow.destination,
            payload_id=self._next_payload,
            size=self.config.traffic.packet_size,
        )
        self._next_payload += 1
        self.sent += 1
        self._live.add(pkt.payload_id)
        self._send_from_origin(self.nodes[flow.source], pkt)
        self._schedule_at(flow.send_time(k + 1), EventKind.TRAFFIC_GEN, (idx, k + 1))

    def _send_from_origin(self, node: NodeState, pkt: Packet) -> None:
        """Sends along the best cached route, or buffers and discovers one."""
        while True:
            route = select_route(
                node.route_cache, pkt.destination, node.ni_table, self.grade_threshold
            )
            if route is None:
                self._buffer(node, pkt)
                return
            routed = Packet(
                PacketKind.DATA,
                origin=pkt.origin,
                destination=pkt.destination,
                route=route,
                payload_id=pkt.payload_id,
                size=pkt.size,
            )
            action = forward_data(node.id, routed, self.adjacency[node.id], node.ni_table)
            if action.verdict is Verdict.FORWARD:
                self.transmit(node.id, action.packet, action.next_hop)
                return
            # first link is gone: forget it and try the next route
            node.route_cache.evict_link(node.id, action.next_hop)

    def _expire_send_buffer(self, node: NodeState) -> None:
        keep = []
        for queued_at, pkt in node.send_buffer:
            if self.now - queued_at > SEND_BUFFER_TIMEOUT:
                self._drop(pkt, "no_route")
            else:
                keep.append((queued_at, pkt))
        node.send_buffer = keep

    def _buffer(self, node: NodeState, pkt: Packet) -> None:
        self._expire_send_buffer(node)
        if len(node.send_buffer) >= SEND_BUFFER_SIZE:
            self._drop(pkt, "no_route")
        else:
            node.send_buffer.append((self.now, pkt))
        if pkt.destination not in node.discoveries:
            node.discoveries[pkt.destination] = _Discovery(request_id=-1)
            self._send_rreq(node, pkt.destination)

    def _send_rreq(self, node: NodeState, destination: NodeId) -> None:
        discovery = node.discoveries[destination]
        discovery.request_id = node.next_request_id
        node.next_request_id += 1
        rreq = originate_rreq(node.id, destination, discovery.request_id)
        node.seen.add((node.id, discovery.request_id))
        self.transmit(node.id, rreq)
        self._schedule_at(
            self.now + discovery.backoff,
            EventKind.ROUTE_REQUEST_TIMEOUT,
            (node.id, destination, discovery.request_id),
        )

    def _flush_send_buffer(self, node: NodeState, destination: NodeId) -> None:
        self._expire_send_buffer(node)
        waiting = [p for _, p in node.send_buffer if p.destination == destination]
        node.send_buffer = [e for e in node.send_buffer if e[1].destination != destination]
        for pkt in waiting:
            self._send_from_origin(node, pkt)

    def _on_route_request_timeout(self, payload: Tuple[NodeId, NodeId, int]) -> None:
        node_id, destination, request_id = payload
        node = self.nodes[node_id]
        discovery = node.discoveries.get(destination)
        if discovery is None or discovery.request_id != request_id:
            return
        self._expire_send_buffer(node)
        if not any(p.destination == destination for _, p in node.send_buffer):
            del node.discoveries[destination]
            return
        if discovery.retries >= RREQ_MAX_RETRIES:
            del node.discoveries[destination]
            for _, pkt in node.send_buffer:
                if pkt.destination == destination:
                    self._drop(pkt, "no_route")
            node.send_buffer = [e for e in node.send_buffer if e[1].destination != destination]
            return
        discovery.retries += 1
        discovery.backoff = min(2 * discovery.backoff, RREQ_MAX_BACKOFF)
        self._send_rreq(node, destination)


def run(config: SimConfig) -> MetricsRecord:
    """
    Executes one simulation run.
    Args:
        config: Run configuration (validated here).
    Returns:
        MetricsRecord: Counters of the run; pdr is 1.0 when nothing was sent.
    Raises:
        InvalidConfig: If the configuration violates an invariant.
    """
    return Simulation(config).run()

# Notes:
#   Node behaviour and workload: which nodes are selfish, whether a node forwards a
#   given packet, and the constant-bit-rate flows that generate DATA.
#   Selfish nodes run every protocol duty honestly (discovery, replies, reports,
#   retaliation) and only defect on DATA forwarding.
#
# Purpose:
#   To keep every random decision of the workload behind explicit numpy
#   Generators, so the selfish set, the flows and the drop decisions are a pure
#   function of the seed.

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Set, Tuple

import numpy as np

from src.routing.packets import NodeId, Packet, PacketKind
from src.sim.config import BehaviorKind, BehaviorProfile, FlowScope, SimConfig


def selfish_decision(
    profile: BehaviorProfile, pkt: Packet, rng: np.random.Generator
) -> bool:
    """
    Whether an intermediate node handles pkt (True) or drops it (False).
    Honest nodes always forward. Selfish nodes drop DATA with probability
    data_drop_prob and handle control packets iff participates_in_control.
    Only selfish DATA decisions consume a draw from rng.
    """
    if profile.kind is BehaviorKind.HONEST:
        return True
    if pkt.kind is PacketKind.DATA:
        return not rng.random() < profile.data_drop_prob
    return profile.participates_in_control


def choose_selfish_nodes(
    node_count: int, fraction: float, rng: np.random.Generator
) -> FrozenSet[NodeId]:
    """
    The first round(fraction * node_count) nodes (half-up) of a seeded
    permutation. The permutation depends on the stream only, so for one seed the
    set chosen at a lower fraction is contained in the set at a higher one.
    """
    order = rng.permutation(node_count)
    count = min(node_count, int(math.floor(fraction * node_count + 0.5)))
    return frozenset(int(n) for n in order[:count])


@dataclass(frozen=True)
class Flow:
    source: NodeId
    destination: NodeId
    start: float  # s, offset of the first packet
    interval: float  # s

    def send_time(self, k: int) -> float:
        return self.start + k * self.interval

    def send_times(self, sim_time: float) -> Iterator[float]:
        k = 0
        while self.send_time(k) < sim_time:
            yield self.send_time(k)
            k += 1


def generate_traffic(
    config: SimConfig,
    rng: np.random.Generator,
    group_of: Optional[Mapping[NodeId, int]] = None,
) -> List[Flow]:
    """
    Draws config.traffic.flow_count CBR flows between distinct (source,
    destination) pairs, source != destination. Each flow starts at a uniform
    offset in [0, packet_interval) and then sends one DATA per interval until
    the end of the run. With FlowScope.GROUP the destination is drawn among the
    other members of the source's group in group_of.
    Raises:
        ValueError: If more flows are requested than admissible pairs exist, or
            group-scoped flows are requested without a group assignment.
    """
    n = config.node_count
    t = config.traffic
    members: Dict[int, List[NodeId]] = {}
    if t.scope is FlowScope.GROUP:
        if group_of is None:
            raise ValueError("[ERROR] FLOW-SCOPE GROUP needs a group assignment")
        for node in range(n):
            members.setdefault(group_of[node], []).append(node)
        pairs = sum(len(m) * (len(m) - 1) for m in members.values())
    else:
        pairs = n * (n - 1)
    if t.flow_count > pairs:
        raise ValueError(f"[ERROR] {t.flow_count} flows need more than {pairs} pairs")
    used: Set[Tuple[NodeId, NodeId]] = set()
    flows: List[Flow] = []
    while len(flows) < t.flow_count:
        src = int(rng.integers(n))
        if members:
            others = [m for m in members[group_of[src]] if m != src]
            if not others:
                continue
            dst = others[int(rng.integers(len(others)))]
        else:
            dst = int(rng.integers(n - 1))
            if dst >= src:
                dst += 1
        start = float(rng.uniform(0.0, t.packet_interval))
        if (src, dst) in used:
            continue
        used.add((src, dst))
        flows.append(Flow(src, dst, start, t.packet_interval))
    return flows

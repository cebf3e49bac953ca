# Notes:
#   In-memory packet representation shared by the DSR layer and the event loop.
#   A single frozen dataclass acts as a tagged union over PacketKind; fields that
#   do not apply to a kind keep their defaults.
#
#   route meaning per kind:
#     RREQ        accumulated route, origin first
#     RREP / DATA source route origin -> destination; hop_index = current holder
#     RERR        reverse path detector -> data origin; hop_index = current holder
#     *_REPORT    unused (single-hop broadcasts)

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

NodeId = int
SourceRoute = Tuple[NodeId, ...]


class PacketKind(str, Enum):
    RREQ = "RREQ"
    RREP = "RREP"
    RERR = "RERR"
    DATA = "DATA"
    PFR_REPORT = "PFR_REPORT"
    LBP_REPORT = "LBP_REPORT"


CONTROL_KINDS = (
    PacketKind.RREQ,
    PacketKind.RREP,
    PacketKind.RERR,
    PacketKind.PFR_REPORT,
    PacketKind.LBP_REPORT,
)


@dataclass(frozen=True)
class Packet:
    kind: PacketKind
    origin: NodeId
    destination: Optional[NodeId] = None
    request_id: int = 0
    route: SourceRoute = ()
    hop_index: int = 0
    payload_id: int = -1
    report: Tuple[Tuple[NodeId, float], ...] = ()
    broken_link: Optional[Tuple[NodeId, NodeId]] = None
    isolated: bool = False  # RERR only: broken_link[1] is graded below the threshold
    size: int = 0  # bytes, DATA only

    @property
    def holder(self) -> NodeId:
        """Node currently responsible for the packet on its route."""
        return self.route[self.hop_index]

    @property
    def previous_hop(self) -> Optional[NodeId]:
        if self.kind is PacketKind.RREQ:
            return self.route[-1] if self.route else None
        if self.kind is PacketKind.RREP:
            # replies travel the route backwards
            nxt = self.hop_index + 1
            return self.route[nxt] if nxt < len(self.route) else None
        return self.route[self.hop_index - 1] if self.hop_index > 0 else None


def is_valid_route(route: Sequence[NodeId]) -> bool:
    """No repeated node and at least origin and destination."""
    return len(route) >= 2 and len(set(route)) == len(route)


def route_links(route: Sequence[NodeId]):
    """Directed links (a, b) traversed by a route, in order."""
    return zip(route, route[1:])

# Notes:
#   Simplified Dynamic Source Routing (route discovery, reply, error, source-routed
#   forwarding) with the retaliation hooks:
#     - BP-gated dropping: a packet tied to a neighbour whose NI entry still holds
#       bonus points is dropped and one BP is consumed;
#     - grade-based exclusion: routes and relays through nodes graded below the
#       threshold are avoided.
#   Handlers are per-node state transitions. They mutate the NI table and the
#   route cache they are given (one entry per call) and return an Action that the
#   event loop executes; they never schedule anything themselves.
#   Plain DSR is obtained by passing an empty NI table and grade_threshold=None.
#
#   Not implemented on purpose: gratuitous replies, salvaging, cache replies,
#   snooping of overheard replies, promiscuous route shortening.

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Collection, Dict, Iterable, List, Optional, Set

from src.reputation.engine import NITable, observe_sanctioned_drop
from src.routing.packets import (
    NodeId,
    Packet,
    PacketKind,
    SourceRoute,
    is_valid_route,
    route_links,
)
from src.utils.errors import BrokenReversePath, NotOnRoute, RoutingError


class Verdict(str, Enum):
    FORWARD = "FORWARD"  # hand the packet to next_hop (or rebroadcast)
    PUNISH = "PUNISH"  # dropped, one BP of `punished` consumed
    DROP_DUPLICATE = "DROP_DUPLICATE"
    ISOLATE = "ISOLATE"  # dropped because of the low-grade relay in next_hop
    LINK_BROKEN = "LINK_BROKEN"  # next hop out of range
    REPLY = "REPLY"  # destination answers an RREQ
    CACHED = "CACHED"  # reply reached the discovery origin
    CONSUMED = "CONSUMED"  # error reached the data origin


@dataclass(frozen=True)
class Action:
    verdict: Verdict
    packet: Optional[Packet] = None
    next_hop: Optional[NodeId] = None  # None with FORWARD means broadcast
    punished: Optional[NodeId] = None


class RouteCache:
    """Source routes per destination, as learned from route replies."""

    def __init__(self):
        self.routes: Dict[NodeId, Set[SourceRoute]] = {}

    def insert(self, route: Iterable[NodeId]) -> None:
        route = tuple(route)
        if not is_valid_route(route):
            raise RoutingError(f"[ERROR] Invalid source route {route}")
        self.routes.setdefault(route[-1], set()).add(route)

    def routes_to(self, destination: NodeId) -> Set[SourceRoute]:
        return self.routes.get(destination, set())

    def evict_link(self, a: NodeId, b: NodeId) -> int:
        """Removes every cached route that traverses the directed link a -> b."""
        return self._evict(lambda r: (a, b) in set(route_links(r)))

    def evict_node(self, node: NodeId) -> int:
        """Removes every cached route that relays through node."""
        return self._evict(lambda r: node in r[1:-1])

    def _evict(self, doomed: Callable[[SourceRoute], bool]) -> int:
        evicted = 0
        for dest in list(self.routes):
            keep = {r for r in self.routes[dest] if not doomed(r)}
            evicted += len(self.routes[dest]) - len(keep)
            if keep:
                self.routes[dest] = keep
            else:
                del self.routes[dest]
        return evicted

    def __len__(self) -> int:
        return sum(len(v) for v in self.routes.values())


def grade_of(ni: NITable, node: NodeId) -> float:
    entry = ni.get(node)
    return 1.0 if entry is None else entry.grade


def first_low_graded(
    ni: NITable, hops: Iterable[NodeId], grade_threshold: Optional[float]
) -> Optional[NodeId]:
    """First of hops graded below grade_threshold; always None without a threshold."""
    if grade_threshold is None:
        return None
    return next((hop for hop in hops if grade_of(ni, hop) < grade_threshold), None)


def consume_bonus_point(ni: NITable, candidates: Iterable[NodeId]) -> Optional[NodeId]:
    """
    Consumes one BP from the first candidate whose entry has bp > 0.
    Returns:
        The punished node, or None when nobody is under punishment.
    """
    seen = set()
    for node in candidates:
        if node is None or node in seen:
            continue
        seen.add(node)
        entry = ni.get(node)
        if entry is not None and entry.bp > 0:
            ni[node] = observe_sanctioned_drop(entry)
            return node
    return None


# Route discovery


def originate_rreq(origin: NodeId, destination: NodeId, request_id: int) -> Packet:
    """Fresh route request; the caller owns the request id sequence."""
    return Packet(
        kind=PacketKind.RREQ,
        origin=origin,
        destination=destination,
        request_id=request_id,
        route=(origin,),
    )


def handle_rreq(
    node: NodeId,
    pkt: Packet,
    ni: NITable,
    seen: Set[tuple],
    grade_threshold: Optional[float] = None,
) -> Action:
    """
    Route request processing, in order:
      (a) previous hop or origin under punishment -> PUNISH;
      (a') any relay accumulated so far graded below the threshold -> ISOLATE
           (not marked as seen, so copies over other relays still count);
      (b) (origin, request_id) already handled -> DROP_DUPLICATE;
      (c) node is the destination -> REPLY with an RREP along the reverse path;
      (d) otherwise append node and rebroadcast.
    """
    prev = pkt.route[-1]
    punished = consume_bonus_point(ni, (prev, pkt.origin))
    if punished is not None:
        return Action(Verdict.PUNISH, punished=punished)
    isolated = first_low_graded(ni, pkt.route[1:], grade_threshold)
    if isolated is not None:
        return Action(Verdict.ISOLATE, next_hop=isolated)

    key = (pkt.origin, pkt.request_id)
    if key in seen or node in pkt.route:
        return Action(Verdict.DROP_DUPLICATE)
    seen.add(key)

    route = pkt.route + (node,)
    if node == pkt.destination:
        rrep = Packet(
            kind=PacketKind.RREP,
            origin=node,
            destination=pkt.origin,
            request_id=pkt.request_id,
            route=route,
            hop_index=len(route) - 2,
        )
        return Action(Verdict.REPLY, packet=rrep, next_hop=route[-2])
    return Action(Verdict.FORWARD, packet=replace(pkt, route=route))


def handle_rrep(
    node: NodeId,
    pkt: Packet,
    ni: NITable,
    cache: RouteCache,
    grade_threshold: Optional[float] = None,
) -> Action:
    """
    Route reply processing: the discovery origin caches the route; intermediate
    nodes pass it one hop back, subject to the same BP filter as requests
    (sender, next reverse hop, then both endpoints). An intermediate node that
    grades another relay of the replied route below the threshold drops the
    reply (ISOLATE).
    Raises:
        BrokenReversePath: If node is not on the replied route.
    """
    if node not in pkt.route:
        raise BrokenReversePath(f"[ERROR] Node {node} not on reply route {pkt.route}")
    idx = pkt.route.index(node)
    if idx == 0:
        cache.insert(pkt.route)
        return Action(Verdict.CACHED)
    if idx == len(pkt.route) - 1:
        raise BrokenReversePath(f"[ERROR] Reply returned to its sender {node}")

    prev, nxt = pkt.route[idx + 1], pkt.route[idx - 1]
    punished = consume_bonus_point(ni, (prev, nxt, pkt.origin, pkt.destination))
    if punished is not None:
        return Action(Verdict.PUNISH, punished=punished)
    relays = (hop for hop in pkt.route[1:-1] if hop != node)
    isolated = first_low_graded(ni, relays, grade_threshold)
    if isolated is not None:
        return Action(Verdict.ISOLATE, next_hop=isolated)
    return Action(Verdict.FORWARD, packet=replace(pkt, hop_index=idx - 1), next_hop=nxt)


def make_rerr(node: NodeId, pkt: Packet, unreachable: NodeId, isolated: bool = False) -> Packet:
    """
    Route error for link node -> unreachable, travelling back to pkt.origin.
    With isolated set, unreachable is a low-graded relay anywhere downstream.
    """
    idx = pkt.route.index(node)
    return Packet(
        kind=PacketKind.RERR,
        origin=node,
        destination=pkt.origin,
        route=tuple(reversed(pkt.route[: idx + 1])),
        hop_index=0,
        broken_link=(node, unreachable),
        isolated=isolated,
    )


def handle_rerr(node: NodeId, pkt: Packet, ni: NITable, cache: RouteCache) -> Action:
    """
    Route error processing: evict every cached route through the broken link
    (through the isolated node for an isolation error), then pass the error on
    toward the data origin (BP filtered like replies).
    """
    if pkt.isolated:
        cache.evict_node(pkt.broken_link[1])
    else:
        cache.evict_link(*pkt.broken_link)
    if node == pkt.destination:
        return Action(Verdict.CONSUMED)
    idx = pkt.route.index(node)
    prev, nxt = pkt.route[idx - 1], pkt.route[idx + 1]
    punished = consume_bonus_point(ni, (prev, nxt, pkt.origin, pkt.destination))
    if punished is not None:
        return Action(Verdict.PUNISH, punished=punished)
    return Action(Verdict.FORWARD, packet=replace(pkt, hop_index=idx + 1), next_hop=nxt)


# Route selection and forwarding


def select_route(
    cache: RouteCache,
    destination: NodeId,
    ni: NITable,
    grade_threshold: Optional[float] = None,
) -> Optional[SourceRoute]:
    """
    Shortest cached route whose intermediate nodes all meet the grade threshold;
    ties are broken by lexicographic hop order. None if no route qualifies.
    """
    candidates: List[SourceRoute] = [
        r
        for r in cache.routes_to(destination)
        if first_low_graded(ni, r[1:-1], grade_threshold) is None
    ]
    if not candidates:
        return None
    return min(candidates, key=lambda r: (len(r), r))


def retaliation_filter(node: NodeId, pkt: Packet, ni: NITable) -> Action:
    """
    Drops a DATA packet when its previous hop, origin, or final destination is
    under punishment, consuming one BP from the first of them in that order.
    """
    punished = consume_bonus_point(
        ni,
        (n for n in (pkt.previous_hop, pkt.origin, pkt.destination) if n != node),
    )
    if punished is not None:
        return Action(Verdict.PUNISH, punished=punished)
    return Action(Verdict.FORWARD, packet=pkt)


def forward_data(
    node: NodeId,
    pkt: Packet,
    neighbors: Collection[NodeId],
    ni: NITable,
    grade_threshold: Optional[float] = None,
) -> Action:
    """
    Source-routed forwarding of a DATA packet held by node.
      - a remaining relay graded below the threshold -> ISOLATE with next_hop
        set to that relay (caller reports RERR); the destination is never
        isolated;
      - next hop out of range -> LINK_BROKEN with the packet as attempted;
      - otherwise FORWARD with hop_index advanced.
    Raises:
        NotOnRoute: If node is not the current holder of the packet.
    """
    if pkt.hop_index >= len(pkt.route) - 1 or pkt.route[pkt.hop_index] != node:
        raise NotOnRoute(f"[ERROR] Node {node} does not hold packet {pkt.payload_id}")
    nxt = pkt.route[pkt.hop_index + 1]
    isolated = first_low_graded(ni, pkt.route[pkt.hop_index + 1 : -1], grade_threshold)
    if isolated is not None:
        return Action(Verdict.ISOLATE, next_hop=isolated)
    advanced = replace(pkt, hop_index=pkt.hop_index + 1)
    if nxt not in neighbors:
        return Action(Verdict.LINK_BROKEN, packet=advanced, next_hop=nxt)
    return Action(Verdict.FORWARD, packet=advanced, next_hop=nxt)

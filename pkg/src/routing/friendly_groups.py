# Notes:
#   Friendly-group partition of the network (FGMDSR variant). The terrain is cut
#   into sqrt(k) x sqrt(k) equal rectangles at t=0; a node belongs to the group of
#   its starting rectangle for the whole run, and nodes with a neighbour in another
#   group form the border group. Two logical channels are modelled: route requests
#   flood the origin's and the destination's groups, border links toward the
#   destination's group carry them across, and epoch reports never leave the
#   sender's group.
#
#   Group membership is a static oracle known to every node, including the group
#   of any destination.

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from src.routing.packets import NodeId, Packet
from src.utils.errors import UnsupportedK


@dataclass(frozen=True)
class GroupAssignment:
    k: int
    group_of: Dict[NodeId, int]
    is_border: Dict[NodeId, bool]

    @property
    def side(self) -> int:
        return math.isqrt(self.k)

    def cell(self, group: int) -> Tuple[int, int]:
        """(column, row) of a group in the sqrt(k) x sqrt(k) layout."""
        return group % self.side, group // self.side

    def group_distance(self, a: int, b: int) -> int:
        (ax, ay), (bx, by) = self.cell(a), self.cell(b)
        return abs(ax - bx) + abs(ay - by)

    def sizes(self) -> Dict[int, int]:
        out = {g: 0 for g in range(self.k)}
        for g in self.group_of.values():
            out[g] += 1
        return out


def partition(
    positions: np.ndarray,
    terrain: Tuple[float, float],
    k: int,
    adjacency: Sequence[Sequence[NodeId]],
) -> GroupAssignment:
    """
    Assigns every node to one of k rectangular groups and marks border nodes.
    Args:
        positions: (N, 2) array of node coordinates in metres.
        terrain: (width, height) of the terrain in metres.
        k: Number of groups, a perfect square (default configuration uses 4).
        adjacency: Neighbour lists of the unit-disk graph at t=0.
    Returns:
        GroupAssignment for nodes 0..N-1.
    Raises:
        UnsupportedK: If k < 1 or k is not a perfect square.
    """
    if k < 1 or math.isqrt(k) ** 2 != k:
        raise UnsupportedK(f"[ERROR] GROUP-COUNT must be a perfect square, got {k}")
    side = math.isqrt(k)
    width, height = terrain
    cols = np.clip((positions[:, 0] / width * side).astype(int), 0, side - 1)
    rows = np.clip((positions[:, 1] / height * side).astype(int), 0, side - 1)
    groups = rows * side + cols

    group_of = {i: int(g) for i, g in enumerate(groups)}
    is_border = {
        i: any(group_of[j] != group_of[i] for j in adjacency[i]) for i in group_of
    }
    return GroupAssignment(k=k, group_of=group_of, is_border=is_border)


def scope_flood(
    pkt: Packet, assignment: GroupAssignment
) -> Callable[[NodeId, NodeId], bool]:
    """
    Admissible-receiver predicate for an RREQ transmission.
    Inside the origin's and the destination's groups the request floods freely.
    A copy crossing a group boundary (necessarily over a border link) is accepted
    only when the destination lies outside the sender's group and the receiver's
    group is strictly closer to the destination's group. Groups in between are
    traversed by their border nodes only.
    """
    group_of = assignment.group_of
    ends = (group_of[pkt.origin], group_of[pkt.destination])
    dest_group = ends[1]

    def admissible(sender: NodeId, receiver: NodeId) -> bool:
        gs, gr = group_of[sender], group_of[receiver]
        if gs != gr:
            if gs == dest_group:
                return False
            return assignment.group_distance(gr, dest_group) < assignment.group_distance(
                gs, dest_group
            )
        return gr in ends or assignment.is_border[receiver]

    return admissible


def same_group(assignment: GroupAssignment) -> Callable[[NodeId, NodeId], bool]:
    """Receiver predicate of the intra-group channel, used by the epoch reports."""
    group_of = assignment.group_of
    return lambda sender, receiver: group_of[sender] == group_of[receiver]


def overhead_ratio_model(n: int, k: int) -> float:
    """
    Predicted FGMDSR:MDSR control-overhead ratio, (N^2 / k) / N^2 = 1 / k.
    Raises:
        ValueError: If n or k is smaller than one.
    """
    if n < 1 or k < 1:
        raise ValueError(f"[ERROR] N and k must be >= 1 (got N={n}, k={k})")
    return (n * n / k) / (n * n)

import numpy as np
import pytest

from src.routing.friendly_groups import overhead_ratio_model, partition, same_group, scope_flood
from src.routing.packets import Packet, PacketKind
from src.sim.mobility import place_grid
from src.sim.radio import neighbors
from src.utils.errors import UnsupportedK


def grid_partition(n, side, k):
    positions = place_grid(n, (side, side))
    return partition(positions, (side, side), k, neighbors(positions, 125.227))


def test_single_group_has_no_border():
    groups = grid_partition(121, 1250.0, 1)
    assert set(groups.group_of.values()) == {0}
    assert not any(groups.is_border.values())


def test_four_quadrants_of_default_grid():
    groups = grid_partition(121, 1250.0, 4)
    assert groups.sizes() == {0: 25, 1: 30, 2: 30, 3: 36}
    adjacency = neighbors(place_grid(121, (1250.0, 1250.0)), 125.227)
    for node, border in groups.is_border.items():
        crosses = any(groups.group_of[j] != groups.group_of[node] for j in adjacency[node])
        assert border == crosses
    assert sum(groups.is_border.values()) > 0


@pytest.mark.parametrize("k", [0, 3, 8])
def test_unsupported_group_count(k):
    with pytest.raises(UnsupportedK):
        grid_partition(121, 1250.0, k)


def _line():
    # groups 0 | 1 along a line, range covers one 100 m hop
    positions = np.array([[0.0, 0.0], [100.0, 0.0], [200.0, 0.0], [300.0, 0.0]])
    adjacency = neighbors(positions, 125.227)
    return partition(positions, (400.0, 100.0), 4, adjacency)


def test_scope_flood_crosses_only_toward_destination():
    groups = _line()
    assert [groups.group_of[i] for i in range(4)] == [0, 0, 1, 1]
    assert [groups.is_border[i] for i in range(4)] == [False, True, True, False]

    cross = scope_flood(Packet(PacketKind.RREQ, origin=0, destination=3, route=(0,)), groups)
    assert cross(0, 1) and cross(1, 2) and cross(2, 3)
    assert not cross(2, 1)

    local = scope_flood(Packet(PacketKind.RREQ, origin=0, destination=1, route=(0,)), groups)
    assert local(0, 1)
    assert not local(1, 2)


def test_scope_flood_single_group_admits_everyone():
    groups = grid_partition(49, 750.0, 1)
    admissible = scope_flood(Packet(PacketKind.RREQ, origin=0, destination=48), groups)
    assert all(admissible(i, j) for i in range(49) for j in range(49))


def test_overhead_ratio_model():
    assert overhead_ratio_model(121, 4) == 0.25
    assert overhead_ratio_model(121, 1) == 1.0
    assert overhead_ratio_model(121, 11) == pytest.approx(1 / 11)
    with pytest.raises(ValueError):
        overhead_ratio_model(0, 4)


def _node(column, row, m=11):
    return column * m + row


def test_scope_flood_crosses_middle_groups_on_border_nodes():
    # 11 x 11 grid, k = 4: group 0 is the lower-left quadrant, 3 the upper-right one
    groups = grid_partition(121, 1250.0, 4)
    rreq = Packet(PacketKind.RREQ, origin=_node(0, 0), destination=_node(10, 10), route=(0,))
    admissible = scope_flood(rreq, groups)
    # origin and destination groups flood freely
    assert admissible(_node(0, 0), _node(0, 1))
    assert admissible(_node(10, 9), _node(10, 10))
    # group 1 lies in between: only its border nodes carry the request
    assert groups.group_of[_node(6, 1)] == groups.group_of[_node(5, 1)] == 1
    assert groups.is_border[_node(5, 1)] and not groups.is_border[_node(6, 1)]
    assert admissible(_node(6, 1), _node(5, 1))
    assert not admissible(_node(5, 1), _node(6, 1))
    assert not admissible(_node(8, 2), _node(8, 1))
    # crossings go toward the destination's group only
    assert admissible(_node(4, 1), _node(5, 1))
    assert not admissible(_node(5, 1), _node(4, 1))


def test_intra_group_request_never_leaves_the_group():
    groups = grid_partition(121, 1250.0, 4)
    rreq = Packet(PacketKind.RREQ, origin=_node(0, 0), destination=_node(4, 4), route=(0,))
    admissible = scope_flood(rreq, groups)
    adjacency = neighbors(place_grid(121, (1250.0, 1250.0)), 125.227)
    reached, frontier = {rreq.origin}, [rreq.origin]
    while frontier:
        sender = frontier.pop()
        for r in adjacency[sender]:
            if r not in reached and admissible(sender, r):
                reached.add(r)
                frontier.append(r)
    assert reached == {n for n, g in groups.group_of.items() if g == 0}


def test_reports_stay_in_the_sender_group():
    groups = grid_partition(121, 1250.0, 4)
    on_channel = same_group(groups)
    assert on_channel(_node(4, 1), _node(3, 1))
    assert not on_channel(_node(4, 1), _node(5, 1))

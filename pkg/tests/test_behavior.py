from dataclasses import replace

import numpy as np
import pytest

from src.routing.packets import Packet, PacketKind
from src.sim.behavior import choose_selfish_nodes, generate_traffic, selfish_decision
from src.sim.config import (
    HONEST,
    BehaviorKind,
    BehaviorProfile,
    FlowScope,
    SimConfig,
    TrafficConfig,
)
from src.utils.errors import InvalidConfig
from tests.conftest import make_config

DATA = Packet(PacketKind.DATA, origin=0, destination=3, route=(0, 1, 3), hop_index=1)
RREQ = Packet(PacketKind.RREQ, origin=0, destination=3, route=(0,))


def test_selfish_decision():
    rng = np.random.default_rng(0)
    selfish = BehaviorProfile(BehaviorKind.SELFISH, 1.0, True)
    assert selfish_decision(HONEST, DATA, rng)
    assert not selfish_decision(selfish, DATA, rng)
    assert selfish_decision(selfish, RREQ, rng)
    mute = BehaviorProfile(BehaviorKind.SELFISH, 1.0, participates_in_control=False)
    assert not selfish_decision(mute, RREQ, rng)


def test_only_selfish_data_decisions_draw():
    rng, reference = np.random.default_rng(4), np.random.default_rng(4)
    selfish = BehaviorProfile(BehaviorKind.SELFISH, 0.5, True)
    selfish_decision(HONEST, DATA, rng)
    selfish_decision(selfish, RREQ, rng)
    assert rng.random() == reference.random()


def test_behavior_profile_invariants():
    with pytest.raises(InvalidConfig):
        BehaviorProfile(BehaviorKind.HONEST, 0.5)
    with pytest.raises(InvalidConfig):
        BehaviorProfile(BehaviorKind.SELFISH, 1.5)


def test_selfish_sets_are_nested_across_fractions():
    sets = [choose_selfish_nodes(121, f, np.random.default_rng(42)) for f in (0.1, 0.2, 0.4)]
    assert [len(s) for s in sets] == [12, 24, 48]
    assert sets[0] <= sets[1] <= sets[2]
    assert choose_selfish_nodes(121, 0.0, np.random.default_rng(42)) == frozenset()


def test_single_flow_sends_once_per_interval():
    config = make_config(sim_time=10.0, traffic=TrafficConfig(flow_count=1, packet_interval=1.0))
    (flow,) = generate_traffic(config, np.random.default_rng(2))
    times = list(flow.send_times(config.sim_time))
    assert len(times) == 10
    assert 0.0 <= flow.start < 1.0


def test_flows_are_distinct_and_reproducible():
    config = SimConfig()
    flows = generate_traffic(config, np.random.default_rng(8))
    assert len(flows) == config.traffic.flow_count
    assert all(f.source != f.destination for f in flows)
    assert len({(f.source, f.destination) for f in flows}) == len(flows)
    assert flows == generate_traffic(config, np.random.default_rng(8))


def test_too_many_flows():
    config = make_config(node_count=4, terrain=(100.0, 100.0), traffic=TrafficConfig(flow_count=13))
    with pytest.raises(ValueError):
        generate_traffic(config, np.random.default_rng(0))


def test_group_scoped_flows_stay_inside_their_group():
    group_of = {i: i % 3 for i in range(16)}
    config = make_config(
        node_count=16,
        terrain=(300.0, 300.0),
        traffic=TrafficConfig(flow_count=12, scope=FlowScope.GROUP),
    )
    flows = generate_traffic(config, np.random.default_rng(4), group_of)
    assert len(flows) == 12
    assert all(group_of[f.source] == group_of[f.destination] for f in flows)
    assert all(f.source != f.destination for f in flows)
    with pytest.raises(ValueError):
        generate_traffic(config, np.random.default_rng(4))


def test_group_scoped_flows_respect_the_pair_count():
    group_of = {0: 0, 1: 0, 2: 1, 3: 2}
    config = make_config(
        node_count=4,
        terrain=(100.0, 100.0),
        traffic=TrafficConfig(flow_count=3, scope=FlowScope.GROUP),
    )
    with pytest.raises(ValueError):
        generate_traffic(config, np.random.default_rng(0), group_of)
    ok = replace(config, traffic=replace(config.traffic, flow_count=2))
    flows = generate_traffic(ok, np.random.default_rng(0), group_of)
    assert {(f.source, f.destination) for f in flows} == {(0, 1), (1, 0)}

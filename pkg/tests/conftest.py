# Shared fixtures: small, fast run configurations built on the documented
# defaults. Every engine test starts from one of these and overrides what it
# needs with dataclasses.replace.

from dataclasses import replace

import pytest

from src.sim.config import MobilityConfig, MobilityModel, SimConfig, TrafficConfig, Variant

STATIC = MobilityConfig(model=MobilityModel.NONE)


def make_config(**overrides) -> SimConfig:
    """SimConfig() with the given fields replaced."""
    return replace(SimConfig(), **overrides)


@pytest.fixture
def grid9() -> SimConfig:
    """3 x 3 static grid, 100 m spacing: every node hears its 4-neighbourhood only."""
    return make_config(
        node_count=9,
        terrain=(200.0, 200.0),
        mobility=STATIC,
        traffic=TrafficConfig(flow_count=1),
        variant=Variant.MDSR,
    )


@pytest.fixture
def static49() -> SimConfig:
    """7 x 7 static grid, 125 m spacing, short run with two full mode cycles."""
    return make_config(
        node_count=49,
        terrain=(750.0, 750.0),
        mobility=STATIC,
        sim_time=60.0,
        protected_window=20.0,
        normal_window=10.0,
    )


@pytest.fixture
def mobile25() -> SimConfig:
    """5 x 5 random-waypoint grid; nodes leave their first pause after 10 s."""
    return make_config(
        node_count=25,
        terrain=(500.0, 500.0),
        mobility=MobilityConfig(pause=10.0, v_min=1.0, v_max=10.0),
        sim_time=60.0,
        protected_window=20.0,
        normal_window=10.0,
    )

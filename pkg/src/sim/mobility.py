# Notes:
#   Node placement and random-waypoint movement, vectorised over nodes with numpy.
#   Positions advance in granularity-sized quanta along each leg: the exact
#   distance travelled is kept per node and the reported position is the leg
#   start plus the travelled distance floored to a multiple of the granularity.
#   Every node starts paused at its placement position for the configured pause.
#
# Purpose:
#   To give the event loop a pure step function (state, dt, rng) -> state whose
#   random draws depend only on the mobility stream, so two runs with the same
#   seed move identically whatever the routing variant.

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.sim.config import MobilityConfig
from src.utils.errors import NotASquare

# Safety bound on legs completed by a single node within one step
_MAX_LEGS_PER_STEP = 1000


def place_grid(node_count: int, terrain: Tuple[float, float]) -> np.ndarray:
    """
    m x m lattice with corner at (0, 0) and spacing side / (m - 1) per axis.
    Node i sits at column i // m, row i % m, so 4 nodes on 100 x 100 are
    (0,0), (0,100), (100,0), (100,100).
    Args:
        node_count: Number of nodes, m^2 with m >= 2.
        terrain: (width, height) in metres.
    Returns:
        np.ndarray: (node_count, 2) float array of positions.
    Raises:
        NotASquare: If node_count is not a square of an integer >= 2.
    """
    m = math.isqrt(max(node_count, 0))
    if m < 2 or m * m != node_count:
        raise NotASquare(f"[ERROR] GRID placement needs m^2 nodes (m >= 2), got {node_count}")
    width, height = terrain
    xs = np.arange(m) * (width / (m - 1))
    ys = np.arange(m) * (height / (m - 1))
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()]).astype(float)


@dataclass
class WaypointState:
    positions: np.ndarray  # (N, 2) reported, quantised positions
    leg_start: np.ndarray  # (N, 2)
    waypoints: np.ndarray  # (N, 2)
    speeds: np.ndarray  # (N,) m/s
    travelled: np.ndarray  # (N,) exact distance along the current leg
    pause_left: np.ndarray  # (N,) s

    def copy(self) -> "WaypointState":
        return WaypointState(*(a.copy() for a in self._arrays()))

    def _arrays(self):
        return (
            self.positions,
            self.leg_start,
            self.waypoints,
            self.speeds,
            self.travelled,
            self.pause_left,
        )


def _pause_of(config: MobilityConfig) -> float:
    # a zero pause still has to end inside the next step
    return max(float(config.pause), float(np.nextafter(0.0, 1.0)))


def init_waypoints(positions: np.ndarray, config: MobilityConfig) -> WaypointState:
    """All nodes paused at their initial position for config.pause seconds."""
    n = positions.shape[0]
    return WaypointState(
        positions=positions.astype(float).copy(),
        leg_start=positions.astype(float).copy(),
        waypoints=positions.astype(float).copy(),
        speeds=np.zeros(n),
        travelled=np.zeros(n),
        pause_left=np.full(n, _pause_of(config)),
    )


def _quantised(state: WaypointState, i: int, granularity: float) -> np.ndarray:
    leg = state.waypoints[i] - state.leg_start[i]
    length = float(np.hypot(*leg))
    if length == 0.0:
        return state.leg_start[i].copy()
    if state.travelled[i] >= length:
        return state.waypoints[i].copy()
    shown = min(math.floor(state.travelled[i] / granularity) * granularity, length)
    return state.leg_start[i] + leg * (shown / length)


def step_random_waypoint(
    state: WaypointState,
    dt: float,
    rng: np.random.Generator,
    config: MobilityConfig,
    terrain: Tuple[float, float],
) -> WaypointState:
    """
    Advances every node by dt seconds of random-waypoint movement.
      - paused nodes consume their pause first;
      - at the end of a pause a uniform waypoint in the terrain and a uniform
        speed in [v_min, v_max] are drawn (waypoint x, waypoint y, speed);
      - on arrival the node pauses config.pause seconds.
    Nodes are processed in id order, so draws are reproducible per stream.
    Args:
        state: Current state (left untouched).
        dt: Step length in seconds, > 0.
        rng: Mobility random stream.
        config: Mobility parameters.
        terrain: (width, height) in metres.
    Returns:
        WaypointState: The advanced state.
    """
    if dt <= 0:
        raise ValueError(f"[ERROR] Mobility step must be positive, got {dt}")
    out = state.copy()
    if config.is_static:
        return out
    width, height = terrain

    for i in range(out.positions.shape[0]):
        t = float(dt)
        for _ in range(_MAX_LEGS_PER_STEP):
            if t <= 0.0:
                break
            if out.pause_left[i] > 0.0:
                used = min(out.pause_left[i], t)
                out.pause_left[i] -= used
                t -= used
                if out.pause_left[i] > 0.0:
                    break
                # new leg
                out.leg_start[i] = out.waypoints[i]
                out.waypoints[i] = (rng.uniform(0.0, width), rng.uniform(0.0, height))
                out.speeds[i] = rng.uniform(config.v_min, config.v_max)
                out.travelled[i] = 0.0
                continue
            speed = float(out.speeds[i])
            if speed <= 0.0:
                break
            length = float(np.hypot(*(out.waypoints[i] - out.leg_start[i])))
            remaining = length - out.travelled[i]
            if speed * t < remaining:
                out.travelled[i] += speed * t
                t = 0.0
            else:
                t -= remaining / speed
                out.travelled[i] = length
                out.pause_left[i] = _pause_of(config)
        out.positions[i] = _quantised(out, i, config.granularity)
    return out

# Notes:
#   Unit-disk radio: two distinct nodes hear each other iff their euclidean
#   distance is at most the radio range. Propagation physics are folded into the
#   single range value (125.227 m by default). Links are symmetric.

from __future__ import annotations

from typing import List, Tuple

import numpy as np

Adjacency = List[Tuple[int, ...]]


def adjacency_matrix(positions: np.ndarray, radio_range: float) -> np.ndarray:
    """(N, N) boolean matrix of the unit-disk graph, False on the diagonal."""
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    adj = dist <= radio_range
    np.fill_diagonal(adj, False)
    return adj


def neighbors(positions: np.ndarray, radio_range: float) -> Adjacency:
    """
    Neighbour lists of the unit-disk graph, each sorted by node id.
    Args:
        positions: (N, 2) array of coordinates in metres.
        radio_range: Maximum link distance in metres.
    Returns:
        Adjacency: adjacency[i] is the tuple of nodes within range of i.
    """
    adj = adjacency_matrix(np.asarray(positions, dtype=float), radio_range)
    return [tuple(int(j) for j in np.flatnonzero(row)) for row in adj]

"""Communication graph of the followers plus the leader pinning pattern."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CommGraph:
    """Follower digraph with binary adjacency and leader pins.

    ``adjacency[i, j] == 1`` means follower ``i`` receives from follower ``j``;
    ``pinning[i] == 1`` means follower ``i`` receives from the leader.
    """

    adjacency: np.ndarray
    pinning: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=float)
        pins = np.array(self.pinning, dtype=float).reshape(-1)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise GraphError(f"adjacency must be square, got shape {adj.shape}")
        n = adj.shape[0]
        if n == 0:
            raise GraphError("graph needs at least one follower")
        if pins.shape != (n,):
            raise GraphError(f"pinning must have length {n}, got {pins.shape[0]}")
        if not np.all((adj == 0) | (adj == 1)):
            raise GraphError("adjacency entries must be 0 or 1")
        if not np.all((pins == 0) | (pins == 1)):
            raise GraphError("pinning entries must be 0 or 1")
        if np.any(np.diag(adj) != 0):
            raise GraphError("adjacency diagonal must be zero")
        if not pins.any():
            raise GraphError("at least one follower must be pinned to the leader")
        adj.setflags(write=False)
        pins.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "pinning", pins)

    @property
    def n_followers(self) -> int:
        return self.adjacency.shape[0]

    def neighbors(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.adjacency[i])]


@dataclass(frozen=True, eq=False)
class LaplacianPair:
    laplacian: np.ndarray
    pin_matrix: np.ndarray

    @property
    def gain_matrix(self) -> np.ndarray:
        """``L + C``, the matrix mapping global errors to local errors."""
        return self.laplacian + self.pin_matrix


def laplacian(graph: CommGraph) -> LaplacianPair:
    adj = graph.adjacency
    lap = np.diag(adj.sum(axis=1)) - adj
    return LaplacianPair(laplacian=lap, pin_matrix=np.diag(graph.pinning))


def is_strongly_connected(adjacency) -> bool:
    adj = np.asarray(adjacency)
    if adj.shape[0] == 1:
        return True
    n_comp, _ = connected_components(adj, directed=True, connection="strong")
    return n_comp == 1


def is_connected_with_leader_access(graph: CommGraph) -> bool:
    return bool(graph.pinning.any()) and is_strongly_connected(graph.adjacency)


def max_row_gain(graph: CommGraph) -> float:
    """max_i (sum_j a_ij + c_i), the graph factor in the twin-layer gain condition."""
    return float(np.max(graph.adjacency.sum(axis=1) + graph.pinning))

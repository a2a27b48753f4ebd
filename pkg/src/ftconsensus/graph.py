"""Weighted undirected interaction graphs.

Adjacency is stored densely; the networks simulated here have a handful of
agents and every protocol touches all pairs anyway.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised when a graph description violates the undirected-graph invariants."""


class Graph:
    """Immutable weighted undirected graph over agents ``0..n-1``."""

    __slots__ = ("_weights",)

    def __init__(self, weights: np.ndarray | Sequence[Sequence[float]]):
        w = np.array(weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] == 0:
            raise GraphError(f"adjacency must be a non-empty square matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise GraphError("adjacency contains non-finite entries")
        n = w.shape[0]
        for i in range(n):
            if w[i, i] != 0.0:
                raise GraphError(f"self-loop at ({i}, {i}): diagonal must be zero")
            for j in range(i + 1, n):
                if w[i, j] != w[j, i]:
                    raise GraphError(
                        f"adjacency not symmetric at ({i}, {j}): {w[i, j]!r} != {w[j, i]!r}"
                    )
                if w[i, j] < 0.0:
                    raise GraphError(f"negative weight at ({i}, {j}): {w[i, j]!r}")
        w.setflags(write=False)
        self._weights = w

    @property
    def weights(self) -> np.ndarray:
        """Read-only ``n x n`` adjacency matrix."""
        return self._weights

    @property
    def n(self) -> int:
        return self._weights.shape[0]

    def edges(self) -> list[tuple[int, int, float]]:
        """Unordered edges ``(i, j, a_ij)`` with ``i < j`` in lexicographic order."""
        n = self.n
        return [
            (i, j, float(self._weights[i, j]))
            for i in range(n)
            for j in range(i + 1, n)
            if self._weights[i, j] > 0.0
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self._weights, other._weights)

    def __hash__(self) -> int:
        return hash(self._weights.tobytes())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"


def build_graph(n: int, entries: Iterable[Sequence[float]]) -> Graph:
    """Build a graph from an edge list ``[(i, j, weight), ...]`` with 0-based indices."""
    if int(n) != n or n < 1:
        raise GraphError(f"agent count must be a positive integer, got {n!r}")
    n = int(n)
    w = np.zeros((n, n))
    seen: set[tuple[int, int]] = set()
    for entry in entries:
        if len(entry) != 3:
            raise GraphError(f"edge must be (i, j, weight), got {entry!r}")
        i, j, weight = entry
        if int(i) != i or int(j) != j:
            raise GraphError(f"edge indices must be integers, got ({i!r}, {j!r})")
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise GraphError(f"self-loop at node {i}")
        weight = float(weight)
        if not weight > 0.0 or not np.isfinite(weight):
            raise GraphError(f"edge ({i}, {j}) weight must be positive and finite, got {weight!r}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"duplicate edge {key}")
        seen.add(key)
        w[i, j] = w[j, i] = weight
    return Graph(w)


def is_connected(g: Graph) -> bool:
    """Breadth-first reachability from node 0 over positive-weight edges."""
    w = g.weights
    visited = [False] * g.n
    visited[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(w[i] > 0.0):
            if not visited[j]:
                visited[j] = True
                queue.append(int(j))
    return all(visited)


def min_positive_weight(g: Graph) -> float:
    """Smallest strictly positive edge weight (kappa in the time bounds)."""
    positive = g.weights[g.weights > 0.0]
    if positive.size == 0:
        raise GraphError("graph has no edges; minimum positive weight is undefined")
    return float(positive.min())


def neighbors(g: Graph, i: int) -> list[tuple[int, float]]:
    if not 0 <= i < g.n:
        raise GraphError(f"node index {i} out of range for n={g.n}")
    row = g.weights[i]
    return [(int(j), float(row[j])) for j in np.flatnonzero(row > 0.0)]


# Six-agent network used by every built-in example (1-indexed pairs
# 1-2, 1-5, 1-6, 2-3, 2-5, 3-4), written 0-based.
SIX_AGENT_EDGES: tuple[tuple[int, int, float], ...] = (
    (0, 1, 1.0),
    (0, 4, 1.0),
    (0, 5, 1.0),
    (1, 2, 1.0),
    (1, 4, 1.0),
    (2, 3, 1.0),
)


def six_agent_graph() -> Graph:
    return build_graph(6, SIX_AGENT_EDGES)

"""Directed graphs, incidence matrices, and connectivity checks."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InvalidVertexError


@dataclass(frozen=True)
class DirectedGraph:
    """A directed graph on vertices 1..n with an ordered edge list.

    Edge order is significant: it fixes the row ordering of the incidence
    and rigidity matrices, which keeps every downstream report reproducible.
    Self-loops and duplicate directed edges are rejected; an edge and its
    reverse may coexist (that is how undirected graphs are encoded).
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 vertices, got {self.n}")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for k, (i, j) in enumerate(edges):
            if i == j:
                raise ValueError(f"edge {k} is a self-loop at vertex {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge {k} ({i}, {j}) references a vertex outside 1..{self.n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate directed edge ({i}, {j})")
            seen.add((i, j))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_undirected(self) -> bool:
        """True when every edge appears together with its reverse."""
        edge_set = set(self.edges)
        return all((j, i) in edge_set for i, j in self.edges)


def incidence_matrix(g: DirectedGraph) -> np.ndarray:
    """m-by-n incidence matrix: row k has -1 at the tail and +1 at the head.

    The sign convention makes stacked edge vectors equal to the expanded
    incidence matrix applied to stacked positions.
    """
    H = np.zeros((g.m, g.n))
    for k, (i, j) in enumerate(g.edges):
        H[k, i - 1] = -1.0
        H[k, j - 1] = 1.0
    return H


def expanded_incidence(g: DirectedGraph, d: int) -> np.ndarray:
    """Kronecker product of the incidence matrix with the d-by-d identity."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return np.kron(incidence_matrix(g), np.eye(d))


def is_weakly_connected(g: DirectedGraph) -> bool:
    """True when the underlying undirected graph is connected."""
    adjacency: list[list[int]] = [[] for _ in range(g.n + 1)]
    for i, j in g.edges:
        adjacency[i].append(j)
        adjacency[j].append(i)
    seen = {1}
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == g.n


def out_neighbors(g: DirectedGraph, i: int) -> list[int]:
    """Heads of the edges leaving vertex i, in edge-list order."""
    if not (1 <= i <= g.n):
        raise InvalidVertexError(f"vertex {i} outside 1..{g.n}")
    return [j for (a, j) in g.edges if a == i]


def out_edges(g: DirectedGraph, i: int) -> list[tuple[int, int]]:
    """(edge index, head) pairs for the edges leaving vertex i, in edge order."""
    if not (1 <= i <= g.n):
        raise InvalidVertexError(f"vertex {i} outside 1..{g.n}")
    return [(k, j) for k, (a, j) in enumerate(g.edges) if a == i]

"""Scale-free interaction topology.

Networks are grown by preferential attachment starting from a complete core
of ``m_attach + 1`` nodes. Every new node adds ``m_attach`` distinct edges whose
targets are drawn with probability proportional to current degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for invalid generator parameters or node ids."""


class InsufficientTailError(ValueError):
    """Raised when too few nodes qualify for a tail-exponent fit."""


@dataclass(frozen=True)
class GraphParams:
    n: int
    m_attach: int = 2
    seed: int = 0

    def validate(self) -> None:
        if self.n <= 0:
            raise GraphError(f"n must be positive, got {self.n}")
        if self.m_attach <= 0:
            raise GraphError(f"m_attach must be positive, got {self.m_attach}")
        if self.m_attach >= self.n:
            raise GraphError(f"m_attach ({self.m_attach}) must be smaller than n ({self.n})")


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph over node ids ``0..node_count-1``.

    ``adjacency[v]`` is a sorted tuple so iteration order, and therefore every
    random neighbour draw, is reproducible.
    """

    node_count: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj: list[set[int]] = [set() for _ in range(node_count)]
        for u, v in edges:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise GraphError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(node_count, tuple(tuple(sorted(s)) for s in adj))

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.node_count)

    def edges(self) -> list[tuple[int, int]]:
        """Edge list with ``u < v``, sorted lexicographically."""
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def is_connected(self) -> bool:
        if self.node_count == 0:
            return True
        seen = bytearray(self.node_count)
        seen[0] = 1
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    stack.append(v)
        return count == self.node_count


def generate_scale_free(params: GraphParams) -> Graph:
    """Grow a Barabási–Albert network.

    The edge count is ``C(m0, 2) + (n - m0) * m_attach`` with ``m0 = m_attach + 1``.
    Degree-proportional sampling draws uniformly from a list holding both
    endpoints of every edge; repeated targets for the same new node are redrawn.
    """
    params.validate()
    n, m = params.n, params.m_attach
    rng = np.random.default_rng(params.seed)
    core = m + 1

    adj: list[list[int]] = [[] for _ in range(n)]
    endpoints: list[int] = []
    for u in range(core):
        for v in range(u + 1, core):
            adj[u].append(v)
            adj[v].append(u)
            endpoints.extend((u, v))

    for new in range(core, n):
        targets: list[int] = []
        while len(targets) < m:
            t = endpoints[int(rng.integers(len(endpoints)))]
            if t not in targets:
                targets.append(t)
        for t in targets:
            adj[new].append(t)
            adj[t].append(new)
            endpoints.extend((new, t))

    return Graph(n, tuple(tuple(sorted(a)) for a in adj))


def neighbors(g: Graph, v: int) -> tuple[int, ...]:
    if not 0 <= v < g.node_count:
        raise GraphError(f"node {v} out of range for {g.node_count} nodes")
    return g.adjacency[v]


def degree_exponent_estimate(degrees: Graph | Sequence[int] | np.ndarray, k_min: int) -> float:
    """Continuous-approximation MLE of the power-law tail exponent.

    ``1 + M / sum(ln(k_i / (k_min - 0.5)))`` over the ``M`` degrees ``k_i >= k_min``.
    Accepts a graph or a raw degree sequence.
    """
    if k_min < 1:
        raise ValueError(f"k_min must be positive, got {k_min}")
    ks = degrees.degrees() if isinstance(degrees, Graph) else np.asarray(degrees, dtype=np.float64)
    tail = ks[ks >= k_min].astype(np.float64)
    if tail.size < 10:
        raise InsufficientTailError(
            f"only {tail.size} nodes with degree >= {k_min}; need at least 10"
        )
    return 1.0 + tail.size / math.fsum(np.log(tail / (k_min - 0.5)))


def format_edge_list(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges())


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8")

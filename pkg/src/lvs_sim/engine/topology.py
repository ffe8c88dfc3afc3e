"""
Neighbor graphs and mobile hotspot selection for LVS Sim.

The neighbor graph is the exact disc graph of a set of positions. MHS
selection is a set cover: every user with at least one neighbor must be an
MHS or be adjacent to one. The greedy selector carries the H(n)
approximation guarantee; the brute-force selector is the exact reference
for small instances.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from ..core.errors import SearchLimitError
from ..core.geometry import Position, UserId

logger = logging.getLogger(__name__)

BRUTEFORCE_NODE_LIMIT = 20


@dataclass(frozen=True)
class NeighborGraph:
    """Irreflexive, symmetric neighbor relation over a set of users."""

    nodes: frozenset[UserId]
    adjacency: Mapping[UserId, frozenset[UserId]] = field(default_factory=dict)

    @classmethod
    def from_edges(
        cls, nodes: Iterable[UserId], edges: Iterable[tuple[UserId, UserId]]
    ) -> NeighborGraph:
        node_set = frozenset(nodes)
        adj: dict[UserId, set[UserId]] = {n: set() for n in node_set}
        for a, b in edges:
            if a == b:
                continue
            if a not in adj or b not in adj:
                raise ValueError(f"Edge ({a}, {b}) references an unknown node")
            adj[a].add(b)
            adj[b].add(a)
        return cls(node_set, {n: frozenset(v) for n, v in adj.items()})

    def neighbors(self, u: UserId) -> frozenset[UserId]:
        return self.adjacency.get(u, frozenset())

    def degree(self, u: UserId) -> int:
        return len(self.neighbors(u))

    def has_edge(self, a: UserId, b: UserId) -> bool:
        return b in self.neighbors(a)

    def edges(self) -> Iterator[tuple[UserId, UserId]]:
        """Each undirected edge once, as (smaller id, larger id)."""
        for a in sorted(self.nodes):
            for b in sorted(self.neighbors(a)):
                if a < b:
                    yield a, b

    def induced(self, subset: Iterable[UserId]) -> NeighborGraph:
        keep = frozenset(subset) & self.nodes
        return NeighborGraph(keep, {n: self.neighbors(n) & keep for n in keep})

    def non_isolated(self) -> frozenset[UserId]:
        return frozenset(n for n in self.nodes if self.adjacency.get(n))


def neighbor_graph(positions: Mapping[UserId, Position], wifi_range: float) -> NeighborGraph:
    """Exact disc graph: an edge joins users at distance <= wifi_range.

    Args:
        positions: Position of every user.
        wifi_range: Disc radius in meters (> 0).
    """
    if wifi_range <= 0:
        raise ValueError("wifi_range must be > 0")

    ids = sorted(positions)
    if len(ids) < 2:
        return NeighborGraph.from_edges(ids, [])

    coords = np.array([(positions[u].x, positions[u].y) for u in ids], dtype=float)
    tree = cKDTree(coords)
    pairs = tree.query_pairs(r=wifi_range, output_type="ndarray")
    return NeighborGraph.from_edges(ids, ((ids[i], ids[j]) for i, j in pairs))


def covers(g: NeighborGraph, selection: Iterable[UserId]) -> bool:
    """Check the covering property independently of any selector.

    Every user with degree >= 1 must be selected or adjacent to a
    selected user, and no isolated user may be selected.
    """
    chosen = set(selection)
    if any(g.degree(u) == 0 for u in chosen) or not chosen <= g.nodes:
        return False
    return all(u in chosen or g.neighbors(u) & chosen for u in g.non_isolated())


def harmonic(n: int) -> Fraction:
    """n-th harmonic number, exactly."""
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def greedy_mhs_select(g: NeighborGraph) -> set[UserId]:
    """Greedy set cover over closed neighborhoods.

    Repeatedly picks the candidate whose closed neighborhood N(u) + {u}
    covers the most still-uncovered users; ties go to the smallest id.
    Isolated users are outside the universe and never selected.

    Uses a lazy max-heap: stale gains are re-evaluated when popped.
    """
    universe = g.non_isolated()
    uncovered = set(universe)
    selected: set[UserId] = set()

    heap = [(-(g.degree(u) + 1), u) for u in universe]
    heapq.heapify(heap)

    while uncovered and heap:
        neg_gain, u = heapq.heappop(heap)
        closed = g.neighbors(u) | {u}
        gain = len(closed & uncovered)
        if gain == 0:
            continue
        if gain != -neg_gain:
            heapq.heappush(heap, (-gain, u))
            continue
        selected.add(u)
        uncovered -= closed

    return selected


def optimal_mhs_bruteforce(g: NeighborGraph) -> set[UserId]:
    """Minimum-cardinality cover by exhaustive search.

    Among minimum covers, returns the lexicographically smallest (sorted
    id tuple).

    Raises:
        SearchLimitError: If the graph has more than 20 nodes.
    """
    if len(g.nodes) > BRUTEFORCE_NODE_LIMIT:
        raise SearchLimitError(
            f"Exhaustive MHS search refused for {len(g.nodes)} nodes "
            f"(limit {BRUTEFORCE_NODE_LIMIT})"
        )

    candidates = sorted(g.non_isolated())
    if not candidates:
        return set()

    for k in range(1, len(candidates) + 1):
        for subset in itertools.combinations(candidates, k):
            if covers(g, subset):
                return set(subset)

    # unreachable: the full candidate set always covers
    return set(candidates)

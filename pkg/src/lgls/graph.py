"""Dynamic weighted graph with lazily revealed edge costs.

Topology is fixed for the lifetime of a graph; only edge costs change.
True costs are expensive to obtain (an oracle call such as a collision
check), so :class:`WeightModel` keeps a ledger of evaluated edges and
serves cheap heuristic estimates for everything else.  Environment
changes evict ledger entries instead of triggering fresh oracle calls;
the next search decides which of the changed edges are worth evaluating.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

INF = math.inf


class GraphError(Exception):
    """Structural error: unknown vertex or edge, or invalid topology."""


class Edge(NamedTuple):
    source: int
    target: int


@dataclass
class GraphDelta:
    """Edges whose true cost changed in the environment.

    Entries are arcs; in undirected graphs one arc per edge is enough
    (both directions share a cost slot).  Listing both arcs is allowed
    and collapses to the same slot.
    """

    changed: list[Edge]

    def __len__(self) -> int:
        return len(self.changed)


class Graph:
    """Directed graph over dense integer vertex ids 0..n-1.

    With ``undirected=True`` each ``add_edge(u, v)`` stores the arc pair
    (u, v) and (v, u) sharing a single cost slot, so evaluating one
    direction reveals the other (a collision check has no direction).
    """

    def __init__(self, vertex_count: int, undirected: bool = False):
        if vertex_count < 1:
            raise GraphError(f"vertex_count must be >= 1, got {vertex_count}")
        self.vertex_count = vertex_count
        self.undirected = undirected
        self._succ: list[list[int]] = [[] for _ in range(vertex_count)]
        self._pred: list[list[int]] = [[] for _ in range(vertex_count)]
        self._slot_of: dict[tuple[int, int], int] = {}
        self._slot_edges: list[Edge] = []

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise GraphError(f"vertex {v} out of range [0, {self.vertex_count})")

    def add_edge(self, u: int, v: int) -> int:
        """Add arc (u, v) (and (v, u) in undirected mode). Returns the slot index."""
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        if (u, v) in self._slot_of:
            raise GraphError(f"duplicate edge ({u}, {v})")
        slot = len(self._slot_edges)
        self._slot_edges.append(Edge(u, v))
        self._slot_of[(u, v)] = slot
        self._succ[u].append(v)
        self._pred[v].append(u)
        if self.undirected:
            self._slot_of[(v, u)] = slot
            self._succ[v].append(u)
            self._pred[u].append(v)
        return slot

    def succ(self, v: int) -> list[int]:
        self._check_vertex(v)
        return self._succ[v]

    def pred(self, v: int) -> list[int]:
        self._check_vertex(v)
        return self._pred[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._slot_of

    def slot(self, u: int, v: int) -> int:
        """Cost-slot index of arc (u, v); raises GraphError for unknown arcs."""
        try:
            return self._slot_of[(u, v)]
        except KeyError:
            raise GraphError(f"unknown edge ({u}, {v})") from None

    @property
    def slot_count(self) -> int:
        return len(self._slot_edges)

    def slot_edge(self, slot: int) -> Edge:
        """Canonical arc stored for a slot (the orientation passed to add_edge)."""
        return self._slot_edges[slot]

    def slot_edges(self) -> list[Edge]:
        return list(self._slot_edges)

    def arcs(self) -> Iterable[Edge]:
        """All arcs (both directions in undirected mode)."""
        for (u, v) in self._slot_of:
            yield Edge(u, v)


class WeightModel:
    """Lazy cost view over a graph's edges.

    Evaluated edges serve their cached true cost; everything else serves
    ``inflation * heuristic``.  The heuristic must be strictly positive
    and finite for every edge; at ``inflation == 1`` it must never
    overestimate the true cost (admissibility), which the collision
    harness guarantees by construction.
    """

    def __init__(
        self,
        graph: Graph,
        true_cost: Callable[[int, int], float],
        heuristic: Callable[[int, int], float],
        inflation: float = 1.0,
    ):
        if inflation < 1.0:
            raise ValueError(f"inflation must be >= 1, got {inflation}")
        self.graph = graph
        self.inflation = inflation
        self._true = true_cost
        nslots = graph.slot_count
        self._heur = [0.0] * nslots
        for slot, (u, v) in enumerate(graph.slot_edges()):
            h = heuristic(u, v)
            if not (h > 0.0 and h < INF):
                raise GraphError(
                    f"heuristic weight of edge ({u}, {v}) must be in (0, inf), got {h}"
                )
            self._heur[slot] = h
        self._cached = [0.0] * nslots
        self._evaluated = [False] * nslots
        self._eval_count = 0
        self.insertion_log: list[int] = []

    @property
    def eval_count(self) -> int:
        """Number of distinct ledger insertions since construction (monotone)."""
        return self._eval_count

    @property
    def ledger_size(self) -> int:
        return sum(self._evaluated)

    def heuristic(self, u: int, v: int) -> float:
        """Uninflated heuristic cost of the arc."""
        return self._heur[self.graph.slot(u, v)]

    def is_evaluated(self, u: int, v: int) -> bool:
        return self._evaluated[self.graph.slot(u, v)]

    def lazy_weight(self, u: int, v: int) -> float:
        """Cached true cost if evaluated, inflated heuristic otherwise. Never
        calls the true-cost oracle."""
        slot = self.graph.slot(u, v)
        if self._evaluated[slot]:
            return self._cached[slot]
        return self.inflation * self._heur[slot]

    def evaluate(self, u: int, v: int) -> float:
        """Reveal the true cost of the arc, caching it (one oracle call for the
        first evaluation of a slot, none afterwards)."""
        slot = self.graph.slot(u, v)
        if self._evaluated[slot]:
            return self._cached[slot]
        src, dst = self.graph.slot_edge(slot)
        cost = self._true(src, dst)
        if not cost > 0.0:
            raise GraphError(f"true cost of edge ({src}, {dst}) must be > 0, got {cost}")
        self._cached[slot] = cost
        self._evaluated[slot] = True
        self._eval_count += 1
        self.insertion_log.append(slot)
        return cost

    def apply_delta(self, delta: GraphDelta) -> list[int]:
        """Forget the cached costs of the changed edges.

        Their lazy value reverts to the (inflated) heuristic; no oracle
        call happens here.  Returns the sorted vertices whose incoming
        lazy values changed and therefore need a search-tree update
        (the target of each arc; both endpoints in undirected mode).
        """
        slots = set()
        affected = set()
        for (u, v) in delta.changed:
            slots.add(self.graph.slot(u, v))
            if self.graph.undirected:
                affected.add(u)
                affected.add(v)
            else:
                affected.add(v)
        for slot in slots:
            self._evaluated[slot] = False
        return sorted(affected)

    def reset_ledger(self) -> None:
        """Drop every cached cost (used by from-scratch baselines)."""
        for slot in range(len(self._evaluated)):
            self._evaluated[slot] = False

    def evaluated_slots(self) -> list[int]:
        return [s for s, e in enumerate(self._evaluated) if e]

    def cached_cost(self, slot: int) -> float:
        if not self._evaluated[slot]:
            raise GraphError(f"slot {slot} is not evaluated")
        return self._cached[slot]

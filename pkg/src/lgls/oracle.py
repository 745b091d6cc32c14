"""Ground-truth shortest-path machinery for tests and the benchmark.

``dijkstra`` is the single source of truth: an omniscient single-pair
search over whatever weight view it is handed (true costs for the
optimality oracle, frozen lazy costs for tree-repair checks).  It is
deliberately naive and shares the planners' tie-breaking rules so that
on uniquely-optimal instances even the path, not just the cost, can be
compared.

``astar_true`` mirrors the eager baseline's counting conventions (the
goal pop is an expansion and relaxes the goal's outgoing arcs; an edge
evaluation is the first touch of a cost slot) so first-search count
equivalence can be asserted exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .graph import INF, Graph
from .search import Key, SearchQueue


@dataclass
class OracleResult:
    dist: float
    path: Optional[list[int]]
    settled: list[int] = field(default_factory=list)

    @property
    def reachable(self) -> bool:
        return self.dist < INF


def _walk_parents(parent: list[Optional[int]], source: int, target: int) -> list[int]:
    path = [target]
    while path[-1] != source:
        prev = parent[path[-1]]
        assert prev is not None
        path.append(prev)
    path.reverse()
    return path


def dijkstra(graph: Graph, weight: Callable[[int, int], float], source: int,
             target: Optional[int] = None) -> OracleResult:
    """Single-source shortest path; stops early when ``target`` settles.

    Ties break like the planners do: queue order (dist, dist, vertex id),
    parent choice by smaller vertex id among equal-cost predecessors.
    """
    n = graph.vertex_count
    dist = [INF] * n
    parent: list[Optional[int]] = [None] * n
    settled_order: list[int] = []
    settled = [False] * n
    dist[source] = 0.0
    queue = SearchQueue()
    queue.insert(source, Key(0.0, 0.0))
    while len(queue):
        v, _ = queue.pop()
        settled[v] = True
        settled_order.append(v)
        if v == target:
            break
        dv = dist[v]
        for u in graph.succ(v):
            w = weight(v, u)
            if w == INF:
                continue
            cand = dv + w
            if cand < dist[u]:
                dist[u] = cand
                parent[u] = v
                if u in queue:
                    queue.remove(u)
                queue.insert(u, Key(cand, cand))
            elif cand == dist[u] and not settled[u]:
                prev = parent[u]
                if prev is not None and v < prev:
                    parent[u] = v
    if target is None:
        return OracleResult(INF, None, settled_order)
    if dist[target] == INF:
        return OracleResult(INF, None, settled_order)
    return OracleResult(dist[target], _walk_parents(parent, source, target), settled_order)


def dijkstra_true(graph: Graph, true_cost: Callable[[int, int], float],
                  source: int, target: int) -> OracleResult:
    """Exact single-pair shortest path over true edge costs (omniscient:
    reads costs directly, outside any planner's ledger or counters)."""
    return dijkstra(graph, true_cost, source, target)


@dataclass
class AStarCounts:
    expansions: int = 0
    evaluations: int = 0


def astar_true(graph: Graph, true_cost: Callable[[int, int], float],
               heuristic: Callable[[int], float], source: int,
               target: int) -> tuple[OracleResult, AStarCounts]:
    """Plain A* over true costs with the planners' tie-breaking.

    Expanding a vertex touches every outgoing cost slot (that is the
    zero-step lookahead the eager baseline pays for); distinct slot
    touches are the evaluation count.  The goal pop counts as an
    expansion and relaxes its successors before the search stops.
    """
    n = graph.vertex_count
    g = [INF] * n
    parent: list[Optional[int]] = [None] * n
    counts = AStarCounts()
    touched: set[int] = set()
    g[source] = 0.0
    queue = SearchQueue()
    queue.insert(source, Key(heuristic(source), 0.0))
    settled_order: list[int] = []
    while len(queue):
        v, _ = queue.pop()
        counts.expansions += 1
        settled_order.append(v)
        gv = g[v]
        for u in graph.succ(v):
            slot = graph.slot(v, u)
            if slot not in touched:
                touched.add(slot)
                counts.evaluations += 1
            w = true_cost(v, u)
            cand = gv + w
            if cand < g[u]:
                g[u] = cand
                parent[u] = v
                if u in queue:
                    queue.remove(u)
                queue.insert(u, Key(cand + heuristic(u), cand))
            elif cand == g[u]:
                prev = parent[u]
                if prev is not None and v < prev:
                    parent[u] = v
        if v == target:
            break
    if g[target] == INF:
        return OracleResult(INF, None, settled_order), counts
    return OracleResult(g[target], _walk_parents(parent, source, target), settled_order), counts

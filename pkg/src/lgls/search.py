"""Incremental best-first search tree over lazily estimated edge costs.

The tree keeps two cost-to-come values per vertex: ``g`` (committed) and
``rhs`` (one-step lookahead over the predecessors), plus the backpointer
to the rhs-minimizing predecessor.  Inconsistent vertices (g != rhs)
live in a priority queue keyed by (min(g, rhs) + h, min(g, rhs)); the
repair loop pops them in key order until the goal's key dominates the
queue, pausing early whenever the configured event fires on a vertex
that just turned consistent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

from .graph import Graph

INF = math.inf


class InvariantError(Exception):
    """An internal search invariant was violated (implementation bug)."""


class Key(NamedTuple):
    """Lexicographic queue priority: (min(g,rhs) + h, min(g,rhs))."""

    k1: float
    k2: float


INF_KEY = Key(INF, INF)


class SearchQueue:
    """Indexed binary min-heap of (key, vertex) with exact removal.

    Entries order by (k1, k2, vertex id); at most one live entry per
    vertex.  Removal is exact (no lazy invalidation) because the pop
    order defines the expansion counts reported by the benchmark.
    """

    def __init__(self):
        self._heap: list[tuple[float, float, int]] = []
        self._pos: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, v: int) -> bool:
        return v in self._pos

    def insert(self, v: int, key: Key) -> None:
        if v in self._pos:
            raise InvariantError(f"vertex {v} already queued")
        self._heap.append((key.k1, key.k2, v))
        self._siftup(len(self._heap) - 1)

    def remove(self, v: int) -> None:
        pos = self._pos.pop(v)
        last = self._heap.pop()
        if pos < len(self._heap):
            self._heap[pos] = last
            self._pos[last[2]] = pos
            self._siftdown(pos)
            self._siftup(pos)

    def pop(self) -> tuple[int, Key]:
        if not self._heap:
            raise InvariantError("pop from empty queue")
        k1, k2, v = self._heap[0]
        self.remove(v)
        return v, Key(k1, k2)

    def top_key(self) -> Key:
        if not self._heap:
            return INF_KEY
        k1, k2, _ = self._heap[0]
        return Key(k1, k2)

    def entries(self) -> list[tuple[int, Key]]:
        return [(v, Key(k1, k2)) for (k1, k2, v) in self._heap]

    def _siftup(self, pos: int) -> None:
        heap = self._heap
        entry = heap[pos]
        while pos > 0:
            parent_pos = (pos - 1) // 2
            parent = heap[parent_pos]
            if not entry < parent:
                break
            heap[pos] = parent
            self._pos[parent[2]] = pos
            pos = parent_pos
        heap[pos] = entry
        self._pos[entry[2]] = pos

    def _siftdown(self, pos: int) -> None:
        heap = self._heap
        size = len(heap)
        entry = heap[pos]
        while True:
            left = 2 * pos + 1
            if left >= size:
                break
            right = left + 1
            child = left
            if right < size and heap[right] < heap[left]:
                child = right
            if not heap[child] < entry:
                break
            heap[pos] = heap[child]
            self._pos[heap[pos][2]] = pos
            pos = child
        heap[pos] = entry
        self._pos[entry[2]] = pos


@dataclass
class SearchConfig:
    """Per-search knobs: vertex heuristic, suboptimality factors, event.

    ``heuristic`` is the cost-to-go estimate h(v); it must be consistent
    with respect to the uninflated heuristic edge weights and zero at
    the goal.  ``epsilon1`` inflates unevaluated edge estimates (applied
    inside the weight model), ``epsilon2`` allows the repair loop to
    return a consistent goal path early once it is within a factor
    epsilon2 of the smallest queue key.  ``event`` is the pause
    predicate (None runs the repair to the natural exit).
    """

    heuristic: Callable[[int], float]
    epsilon1: float = 1.0
    epsilon2: float = 1.0
    event: Optional[object] = None

    def validate(self, graph: Graph, edge_heuristic: Callable[[int, int], float], goal: int) -> None:
        if self.epsilon1 < 1.0 or self.epsilon2 < 1.0:
            raise ValueError(
                f"suboptimality factors must be >= 1, got ({self.epsilon1}, {self.epsilon2})"
            )
        if self.epsilon2 > 1.0 and getattr(self.event, "name", None) not in (None, "shortest_path"):
            raise ValueError(
                "early truncation (epsilon2 > 1) only supports the shortest_path event"
            )
        h = self.heuristic
        if h(goal) != 0.0:
            raise ValueError(f"heuristic must be 0 at the goal, got {h(goal)}")
        for (u, v) in graph.arcs():
            if h(u) > edge_heuristic(u, v) + h(v):
                raise ValueError(
                    f"heuristic inconsistent on arc ({u}, {v}): "
                    f"h({u})={h(u)} > {edge_heuristic(u, v)} + h({v})"
                )


@dataclass
class SearchOutcome:
    """Result of one repair run: a subpath (to the goal or to the vertex
    that fired the event) or the proof that no finite-estimate path exists."""

    path: Optional[list[int]]
    triggered: bool = False
    truncated: bool = False

    @property
    def found(self) -> bool:
        return self.path is not None


class SearchTree:
    """The g/rhs/backpointer tree with its repair loop.

    ``weight`` is the arc-cost view the tree plans with: the lazy view
    for lazily evaluated planners, the evaluating view for the eager
    baseline.  ``weights`` is the owning weight model, exposed read-only
    for events that need ledger lookups.
    """

    def __init__(self, graph: Graph, weights, weight: Callable[[int, int], float],
                 start: int, goal: int, config: SearchConfig, debug: bool = False):
        graph._check_vertex(start)
        graph._check_vertex(goal)
        self.graph = graph
        self.weights = weights
        self.weight = weight
        self.start = start
        self.goal = goal
        self.config = config
        self.debug = debug
        self.trigger_hook: Optional[Callable[["SearchTree", list[int]], None]] = None
        n = graph.vertex_count
        self.g = [INF] * n
        self.rhs = [INF] * n
        self.bp: list[Optional[int]] = [None] * n
        self.queue = SearchQueue()
        self.expansions = 0
        self.triggers = 0
        self.pop_log: list[int] = []
        self._pending_expansion: Optional[int] = None
        self.rhs[start] = 0.0
        self.update_vertex(start)

    def reset(self) -> None:
        """Forget all search state (from-scratch baseline)."""
        n = self.graph.vertex_count
        self.g = [INF] * n
        self.rhs = [INF] * n
        self.bp = [None] * n
        self.queue = SearchQueue()
        self._pending_expansion = None
        self.rhs[self.start] = 0.0
        self.update_vertex(self.start)

    def calculate_key(self, v: int) -> Key:
        m = self.rhs[v]
        if self.g[v] < m:
            m = self.g[v]
        return Key(m + self.config.heuristic(v), m)

    def update_vertex(self, v: int) -> None:
        """Recompute rhs(v)/bp(v) from the predecessors and requeue v iff
        it is inconsistent.  The start vertex keeps rhs = 0 forever."""
        if v != self.start:
            best = INF
            best_u: Optional[int] = None
            g = self.g
            weight = self.weight
            for u in self.graph.pred(v):
                gu = g[u]
                if gu == INF:
                    continue
                cand = gu + weight(u, v)
                if cand < best or (best_u is not None and cand == best and u < best_u):
                    best = cand
                    best_u = u
            self.rhs[v] = best
            self.bp[v] = best_u
        if v in self.queue:
            self.queue.remove(v)
        if self.g[v] != self.rhs[v]:
            self.queue.insert(v, self.calculate_key(v))

    def extract_path(self, v: int) -> list[int]:
        """Backpointer chain from the start to v, inclusive."""
        limit = self.graph.vertex_count
        chain = [v]
        cur = v
        while cur != self.start:
            prev = self.bp[cur]
            if prev is None or len(chain) > limit:
                raise InvariantError(f"broken or cyclic backpointer chain at vertex {cur}")
            chain.append(prev)
            cur = prev
        chain.reverse()
        return chain

    def path_cost(self, path: list[int]) -> float:
        total = 0.0
        for u, v in zip(path, path[1:]):
            total += self.weight(u, v)
        return total

    def compute_shortest_path(self, event: Optional[object] = None) -> SearchOutcome:
        """Repair the tree until the goal key dominates the queue, pausing
        when the event fires on a vertex that just turned consistent.

        Returns the backpointer path to the trigger vertex or to the
        goal, or no path when every route has infinite estimate.  Each
        pop counts as one vertex expansion.
        """
        if event is None:
            event = self.config.event
        if self._pending_expansion is not None:
            u = self._pending_expansion
            self._pending_expansion = None
            for v in self.graph.succ(u):
                self.update_vertex(v)
        goal = self.goal
        queue = self.queue
        epsilon2 = self.config.epsilon2
        pop_counts: dict[int, int] = {}
        while True:
            top = queue.top_key()
            if not (top < self.calculate_key(goal) or self.g[goal] != self.rhs[goal]):
                break
            if (
                epsilon2 > 1.0
                and self.g[goal] == self.rhs[goal]
                and self.rhs[goal] < INF
                and self.rhs[goal] <= epsilon2 * top.k1
            ):
                return SearchOutcome(self.extract_path(goal), truncated=True)
            u, _ = queue.pop()
            self.expansions += 1
            self.pop_log.append(u)
            if self.debug:
                pop_counts[u] = pop_counts.get(u, 0) + 1
                if pop_counts[u] > 2:
                    raise InvariantError(f"vertex {u} popped more than twice in one repair run")
            if self.g[u] > self.rhs[u]:
                self.g[u] = self.rhs[u]
                if event is not None and event.triggered(u, self):
                    self.triggers += 1
                    self._pending_expansion = u
                    path = self.extract_path(u)
                    if self.trigger_hook is not None:
                        self.trigger_hook(self, path)
                    return SearchOutcome(path, triggered=True)
                for v in self.graph.succ(u):
                    self.update_vertex(v)
            else:
                self.g[u] = INF
                self.update_vertex(u)
                for v in self.graph.succ(u):
                    self.update_vertex(v)
        if self.rhs[goal] < INF:
            return SearchOutcome(self.extract_path(goal))
        return SearchOutcome(None)

    def check_queue_invariant(self) -> None:
        """Full sweep: a vertex is queued iff g != rhs (debug builds)."""
        queued = {v for v, _ in self.queue.entries()}
        for v in range(self.graph.vertex_count):
            inconsistent = self.g[v] != self.rhs[v]
            if inconsistent != (v in queued):
                raise InvariantError(
                    f"queue invariant broken at vertex {v}: "
                    f"g={self.g[v]} rhs={self.rhs[v]} queued={v in queued}"
                )

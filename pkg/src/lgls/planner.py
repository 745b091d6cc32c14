"""Replanning orchestrators: the evaluate-repair loop and its baselines.

``LifelongGLS`` keeps its search tree, evaluation ledger, and queue
across environment changes: a change only reverts the affected edges to
their heuristic estimates and marks the touched vertices for repair, so
the next plan() call pays just for the inconsistencies that matter.

``ScratchGLS`` runs the identical evaluate-repair loop but forgets
everything whenever the environment changes (the from-scratch lazy
baseline).  ``EagerLPAStar`` plans directly on true costs: it evaluates
every changed edge up front and every incident arc used while repairing
(zero-step lookahead), trading edge evaluations for minimal expansions.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

from .graph import INF, Edge, Graph, GraphDelta, WeightModel
from .search import SearchConfig, SearchTree

SOLVED = "solved"
NO_PATH = "no_path"


class EventContractError(Exception):
    """The event paused on a fully evaluated non-goal subpath: the
    evaluate-repair loop cannot make progress (broken event contract)."""


@dataclass
class EpisodeMetrics:
    """Operation counts for one plan() call.

    ``edge_evaluations`` counts ledger insertions since the end of the
    previous episode, so evaluations a baseline performs while handling
    a change notification are billed to the episode that change belongs
    to.
    """

    edge_evaluations: int = 0
    vertex_expansions: int = 0
    event_triggers: int = 0
    wall_time: float = 0.0


@dataclass
class PlanResult:
    status: str
    path: Optional[list[int]]
    cost: float
    metrics: EpisodeMetrics

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


class BasePlanner:
    """Shared state and metrics plumbing for all planners."""

    def __init__(self, graph: Graph, true_cost: Callable[[int, int], float],
                 edge_heuristic: Callable[[int, int], float], start: int, goal: int,
                 config: SearchConfig, debug: bool = False):
        self.graph = graph
        self.start = start
        self.goal = goal
        self.config = config
        self.debug = debug
        self.weights = WeightModel(graph, true_cost, edge_heuristic,
                                   inflation=config.epsilon1)
        config.validate(graph, self.weights.heuristic, goal)
        self.tree = SearchTree(graph, self.weights, self._weight_view(),
                               start, goal, config, debug=debug)
        self._eval_mark = self.weights.eval_count
        self._expand_mark = self.tree.expansions
        self._trigger_mark = self.tree.triggers
        self.debug_true_cost: Optional[Callable[[int, int], float]] = None

    def _weight_view(self) -> Callable[[int, int], float]:
        raise NotImplementedError

    def _finish_episode(self, status: str, path: Optional[list[int]], t0: float) -> PlanResult:
        metrics = EpisodeMetrics(
            edge_evaluations=self.weights.eval_count - self._eval_mark,
            vertex_expansions=self.tree.expansions - self._expand_mark,
            event_triggers=self.tree.triggers - self._trigger_mark,
            wall_time=time.perf_counter() - t0,
        )
        self._eval_mark = self.weights.eval_count
        self._expand_mark = self.tree.expansions
        self._trigger_mark = self.tree.triggers
        if path is None:
            cost = INF
        else:
            cost = 0.0
            for u, v in zip(path, path[1:]):
                if not self.weights.is_evaluated(u, v):
                    raise AssertionError(
                        f"solved path contains unevaluated edge ({u}, {v})"
                    )
                cost += self.weights.lazy_weight(u, v)
        if self.debug:
            self._debug_sweep()
        return PlanResult(status, path, cost, metrics)

    def _debug_sweep(self) -> None:
        self.tree.check_queue_invariant()
        if self.debug_true_cost is not None and self.weights.inflation == 1.0:
            for slot, (u, v) in enumerate(self.graph.slot_edges()):
                lazy = self.weights.lazy_weight(u, v)
                true = self.debug_true_cost(u, v)
                if lazy > true:
                    raise AssertionError(
                        f"lazy weight overestimates edge ({u}, {v}): {lazy} > {true}"
                    )

    def plan(self) -> PlanResult:
        raise NotImplementedError

    def notify_changes(self, delta: GraphDelta) -> None:
        raise NotImplementedError


class LifelongGLS(BasePlanner):
    """Evaluate-repair planner that survives environment changes.

    plan() alternates tree repair with evaluation of the returned
    subpath until the goal is reached over fully evaluated edges;
    notify_changes() reverts the changed edges to heuristic estimates
    without a single oracle call.
    """

    def _weight_view(self):
        return self.weights.lazy_weight

    def evaluate_edges(self, path: list[int]) -> Optional[Edge]:
        """Evaluate the unevaluated edges along the subpath, front to back,
        stopping at the first whose true cost differs from its prior lazy
        estimate.  Returns that edge, or None if the whole subpath ends up
        evaluated without a discrepancy."""
        for u, v in zip(path, path[1:]):
            if not self.weights.is_evaluated(u, v):
                prior = self.weights.lazy_weight(u, v)
                actual = self.weights.evaluate(u, v)
                if actual != prior:
                    return Edge(u, v)
        return None

    def plan(self) -> PlanResult:
        t0 = time.perf_counter()
        while True:
            outcome = self.tree.compute_shortest_path()
            if not outcome.found:
                return self._finish_episode(NO_PATH, None, t0)
            path = outcome.path
            evals_before = self.weights.eval_count
            discrepant = self.evaluate_edges(path)
            if discrepant is None:
                if path[-1] == self.goal:
                    return self._finish_episode(SOLVED, path, t0)
                if self.weights.eval_count == evals_before:
                    raise EventContractError(
                        "event paused on a fully evaluated subpath that does not "
                        "reach the goal"
                    )
            else:
                self.tree.update_vertex(discrepant.target)
                if self.graph.undirected:
                    self.tree.update_vertex(discrepant.source)

    def notify_changes(self, delta: GraphDelta) -> None:
        evals_before = self.weights.eval_count
        for v in self.weights.apply_delta(delta):
            self.tree.update_vertex(v)
        if self.weights.eval_count != evals_before:
            raise AssertionError("change handling must not evaluate edges")
        if self.debug:
            self._debug_sweep()


class ScratchGLS(LifelongGLS):
    """Same evaluate-repair loop, but every change notification wipes the
    ledger and the whole tree: each episode searches from scratch."""

    def notify_changes(self, delta: GraphDelta) -> None:
        for (u, v) in delta.changed:
            self.graph.slot(u, v)
        self.weights.reset_ledger()
        self.tree.reset()
        if self.debug:
            self._debug_sweep()


class EagerLPAStar(BasePlanner):
    """Incremental repair directly on true edge costs.

    Every changed edge is evaluated as soon as it is announced, and
    repairing a vertex evaluates all incident arcs feeding its lookahead
    value.  No events: each episode is a single repair run.
    """

    def __init__(self, graph, true_cost, edge_heuristic, start, goal, config,
                 debug: bool = False):
        if config.event is not None:
            raise ValueError("the eager baseline does not take an event")
        if config.epsilon1 != 1.0 or config.epsilon2 != 1.0:
            raise ValueError("the eager baseline runs exact (epsilon factors of 1)")
        super().__init__(graph, true_cost, edge_heuristic, start, goal, config,
                         debug=debug)

    def _weight_view(self):
        return self.weights.evaluate

    def plan(self) -> PlanResult:
        t0 = time.perf_counter()
        outcome = self.tree.compute_shortest_path(event=None)
        if not outcome.found:
            return self._finish_episode(NO_PATH, None, t0)
        return self._finish_episode(SOLVED, outcome.path, t0)

    def notify_changes(self, delta: GraphDelta) -> None:
        affected = self.weights.apply_delta(delta)
        seen = set()
        for (u, v) in delta.changed:
            slot = self.graph.slot(u, v)
            if slot not in seen:
                seen.add(slot)
                self.weights.evaluate(u, v)
        for v in affected:
            self.tree.update_vertex(v)
        if self.debug:
            self._debug_sweep()

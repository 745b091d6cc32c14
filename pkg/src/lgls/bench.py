"""Scenario engine: geometric roadmaps, dynamic scenes, and the benchmark runner.

A scenario is a fixed roadmap over the unit square (grid or Halton
sampling, radius connectivity) plus an ordered list of obstacle worlds.
Every configured planner replans once per scene; all planners see the
same graph, the same change announcements, and the same collision
oracle, and are billed individually through their own ledgers.  Scene
diffing is the harness's job (the environment announces its changes):
those omniscient collision checks are never billed to a planner.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .events import make_event
from .graph import INF, Edge, Graph, GraphDelta
from .oracle import dijkstra_true
from .planner import BasePlanner, EagerLPAStar, LifelongGLS, ScratchGLS
from .search import SearchConfig
from .worlds import Circle, Rect, World, edge_cost_table

ALGORITHMS = ("lgls", "gls", "lpa")

CSV_COLUMNS = [
    "scenario", "planner", "episode", "edge_evals", "vertex_expansions",
    "event_triggers", "path_cost", "solved", "approx_time_ms", "wall_ms",
]


class ScenarioError(Exception):
    """Malformed scenario file or specification."""


@dataclass
class PlannerSpec:
    algorithm: str
    event: str = "shortest_path"
    alpha: int = 1
    epsilon1: float = 1.0
    epsilon2: float = 1.0
    label: Optional[str] = None

    def resolved_label(self) -> str:
        if self.label:
            return self.label
        parts = [self.algorithm]
        if self.algorithm != "lpa" and self.event == "constant_depth":
            parts.append(f"cd{self.alpha}")
        if self.epsilon1 != 1.0:
            parts.append(f"e1_{self.epsilon1:g}")
        if self.epsilon2 != 1.0:
            parts.append(f"e2_{self.epsilon2:g}")
        return "-".join(parts)

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ScenarioError(f"unknown algorithm {self.algorithm!r}")
        if self.event not in ("shortest_path", "constant_depth"):
            raise ScenarioError(f"unknown event {self.event!r}")
        if self.alpha < 1:
            raise ScenarioError(f"alpha must be >= 1, got {self.alpha}")
        if self.epsilon1 < 1.0 or self.epsilon2 < 1.0:
            raise ScenarioError(
                f"epsilon factors must be >= 1, got ({self.epsilon1}, {self.epsilon2})"
            )
        if self.algorithm == "lpa" and (self.epsilon1 != 1.0 or self.epsilon2 != 1.0):
            raise ScenarioError("the lpa baseline runs exact (epsilon factors of 1)")


@dataclass
class ScenarioSpec:
    name: str
    sampling: str
    vertices: int
    radius: float
    start: tuple[float, float]
    goal: tuple[float, float]
    scenes: list[World]
    planners: list[PlannerSpec]
    collision_step: float = 0.01
    eval_busy_wait: float = 0.0
    approx_eval_ms: float = 0.20
    approx_expand_ms: float = 0.86

    def validate(self) -> None:
        if self.sampling not in ("grid", "halton"):
            raise ScenarioError(f"unknown sampling {self.sampling!r}")
        if self.vertices < 2:
            raise ScenarioError(f"need at least 2 vertices, got {self.vertices}")
        if self.radius <= 0.0:
            raise ScenarioError(f"radius must be positive, got {self.radius}")
        if self.collision_step <= 0.0:
            raise ScenarioError(f"collision_step must be positive, got {self.collision_step}")
        if not self.scenes:
            raise ScenarioError("a scenario needs at least one scene")
        if not self.planners:
            raise ScenarioError("a scenario needs at least one planner")
        labels = [p.resolved_label() for p in self.planners]
        if len(set(labels)) != len(labels):
            raise ScenarioError(f"duplicate planner labels: {labels}")
        for p in self.planners:
            p.validate()


# --- vertex sampling --------------------------------------------------------

def radical_inverse(index: int, base: int) -> float:
    """Van der Corput radical inverse of a positive index in the given base."""
    f = 1.0
    r = 0.0
    while index > 0:
        f /= base
        index, digit = divmod(index, base)
        r += f * digit
    return r


def halton_points(n: int) -> np.ndarray:
    """First n Halton points in bases (2, 3), indices starting at 1."""
    return np.array(
        [(radical_inverse(i, 2), radical_inverse(i, 3)) for i in range(1, n + 1)],
        dtype=np.float64,
    )


def grid_points(n: int) -> np.ndarray:
    """First n points of the ceil(sqrt(n))-per-side lattice over the unit
    square (endpoints included), row-major from the bottom-left."""
    k = int(math.ceil(math.sqrt(n)))
    axis = np.linspace(0.0, 1.0, k)
    pts = [(axis[ix], axis[iy]) for iy in range(k) for ix in range(k)]
    return np.array(pts[:n], dtype=np.float64)


@dataclass
class GeometricGraph:
    """A roadmap: graph topology plus the geometry every cost derives from."""

    graph: Graph
    coords: np.ndarray
    lengths: np.ndarray  # per cost slot, aligned with graph slot indices
    start: int
    goal: int
    vertex_h: np.ndarray  # consistent cost-to-go estimates, 0 at the goal

    def edge_heuristic(self, u: int, v: int) -> float:
        return float(self.lengths[self.graph.slot(u, v)])

    def heuristic(self, v: int) -> float:
        return float(self.vertex_h[v])


# Shrink factor keeping the triangle inequality strict under floating
# point for collinear sample layouts (grids); see the heuristic sweep in
# SearchConfig.validate.
_H_SCALE = 1.0 - 1e-9


def build_geometric_graph(spec: ScenarioSpec) -> GeometricGraph:
    """Deterministic roadmap construction: place vertices, connect every
    pair within the radius (undirected), snap start/goal to the nearest
    vertices (ties to the lowest id)."""
    n = spec.vertices
    coords = grid_points(n) if spec.sampling == "grid" else halton_points(n)
    dx = coords[:, 0][:, None] - coords[:, 0][None, :]
    dy = coords[:, 1][:, None] - coords[:, 1][None, :]
    dist = np.hypot(dx, dy)
    adjacent = np.triu(dist <= spec.radius, k=1)
    pairs = np.argwhere(adjacent)
    graph = Graph(n, undirected=True)
    for u, v in pairs:
        graph.add_edge(int(u), int(v))
    lengths = dist[pairs[:, 0], pairs[:, 1]].astype(np.float64)
    start = int(np.argmin(np.hypot(coords[:, 0] - spec.start[0], coords[:, 1] - spec.start[1])))
    goal = int(np.argmin(np.hypot(coords[:, 0] - spec.goal[0], coords[:, 1] - spec.goal[1])))
    goal_xy = coords[goal]
    vertex_h = np.hypot(coords[:, 0] - goal_xy[0], coords[:, 1] - goal_xy[1]) * _H_SCALE
    return GeometricGraph(graph, coords, lengths, start, goal, vertex_h)


# --- scene costs and diffs --------------------------------------------------

def scene_cost_table(geom: GeometricGraph, world: World, step: float) -> np.ndarray:
    """True cost of every slot under one world (omniscient, unbilled)."""
    slot_edges = geom.graph.slot_edges()
    sources = np.fromiter((e.source for e in slot_edges), dtype=np.int64)
    targets = np.fromiter((e.target for e in slot_edges), dtype=np.int64)
    return edge_cost_table(geom.coords, sources, targets, geom.lengths, world, step)


def collision_oracle(geom: GeometricGraph, world: World, step: float) -> Callable[[int, int], float]:
    """Arc-cost view of a world, backed by the precomputed slot table."""
    table = scene_cost_table(geom, world, step)
    graph = geom.graph

    def cost(u: int, v: int) -> float:
        return float(table[graph.slot(u, v)])

    return cost


def diff_tables(graph: Graph, old: np.ndarray, new: np.ndarray) -> GraphDelta:
    changed = np.nonzero(old != new)[0]
    return GraphDelta([graph.slot_edge(int(s)) for s in changed])


def diff_scenes(geom: GeometricGraph, old: World, new: World, step: float) -> GraphDelta:
    """Edges whose collision-checked cost differs between two worlds, one
    arc per cost slot, in slot order."""
    return diff_tables(
        geom.graph,
        scene_cost_table(geom, old, step),
        scene_cost_table(geom, new, step),
    )


# --- planner construction ---------------------------------------------------

def build_planner(pspec: PlannerSpec, geom: GeometricGraph,
                  true_cost: Callable[[int, int], float], debug: bool = False) -> BasePlanner:
    if pspec.algorithm == "lpa":
        config = SearchConfig(geom.heuristic, 1.0, 1.0, None)
        return EagerLPAStar(geom.graph, true_cost, geom.edge_heuristic,
                            geom.start, geom.goal, config, debug=debug)
    event = make_event(pspec.event, pspec.alpha)
    config = SearchConfig(geom.heuristic, pspec.epsilon1, pspec.epsilon2, event)
    cls = LifelongGLS if pspec.algorithm == "lgls" else ScratchGLS
    return cls(geom.graph, true_cost, geom.edge_heuristic,
               geom.start, geom.goal, config, debug=debug)


# --- running ----------------------------------------------------------------

@dataclass
class EpisodeRow:
    scenario: str
    planner: str
    episode: int
    edge_evals: int
    vertex_expansions: int
    event_triggers: int
    path_cost: float
    solved: bool
    approx_time_ms: float
    wall_ms: float
    oracle_cost: float  # omniscient reference, not part of the CSV schema


@dataclass
class EpisodeSnapshot:
    """Render payload: what one planner touched during one episode."""

    scenario: str
    planner: str
    episode: int
    world: World
    evaluated: list[tuple[Edge, float]]
    expanded: list[int]
    tree_edges: list[tuple[int, int]]
    path: Optional[list[int]]


@dataclass
class BenchReport:
    rows: list[EpisodeRow] = field(default_factory=list)
    snapshots: list[EpisodeSnapshot] = field(default_factory=list)


class _SceneHolder:
    """Mutable current-world pointer the planner oracles read through."""

    def __init__(self, graph: Graph, busy_wait: float):
        self.graph = graph
        self.table: Optional[np.ndarray] = None
        self.busy_wait = busy_wait

    def cost(self, u: int, v: int) -> float:
        if self.busy_wait > 0.0:
            deadline = time.perf_counter() + self.busy_wait
            while time.perf_counter() < deadline:
                pass
        return float(self.table[self.graph.slot(u, v)])


def run_scenario(spec: ScenarioSpec, collect_snapshots: bool = False,
                 debug: bool = False) -> BenchReport:
    """Run every configured planner through the scenario's scene sequence.

    Planners are isolated (own ledger, own counters) but share the graph
    topology, the per-scene cost tables, and the change announcements.
    """
    spec.validate()
    geom = build_geometric_graph(spec)
    step = spec.collision_step
    tables = [scene_cost_table(geom, world, step) for world in spec.scenes]
    deltas = [None] + [
        diff_tables(geom.graph, tables[i - 1], tables[i]) for i in range(1, len(tables))
    ]
    oracle_costs = []
    for table in tables:
        view = lambda u, v, t=table: float(t[geom.graph.slot(u, v)])
        oracle_costs.append(dijkstra_true(geom.graph, view, geom.start, geom.goal).dist)

    report = BenchReport()
    for pspec in spec.planners:
        label = pspec.resolved_label()
        holder = _SceneHolder(geom.graph, spec.eval_busy_wait)
        holder.table = tables[0]
        planner = build_planner(pspec, geom, holder.cost, debug=debug)
        if debug:
            planner.debug_true_cost = holder.cost
        for episode, world in enumerate(spec.scenes):
            holder.table = tables[episode]
            if episode > 0:
                planner.notify_changes(deltas[episode])
            eval_mark = len(planner.weights.insertion_log)
            pop_mark = len(planner.tree.pop_log)
            result = planner.plan()
            report.rows.append(EpisodeRow(
                scenario=spec.name,
                planner=label,
                episode=episode,
                edge_evals=result.metrics.edge_evaluations,
                vertex_expansions=result.metrics.vertex_expansions,
                event_triggers=result.metrics.event_triggers,
                path_cost=result.cost,
                solved=result.solved,
                approx_time_ms=(result.metrics.edge_evaluations * spec.approx_eval_ms
                                + result.metrics.vertex_expansions * spec.approx_expand_ms),
                wall_ms=result.metrics.wall_time * 1e3,
                oracle_cost=oracle_costs[episode],
            ))
            if collect_snapshots:
                evaluated = [
                    (planner.graph.slot_edge(slot), planner.weights.cached_cost(slot))
                    for slot in planner.weights.insertion_log[eval_mark:]
                    if slot in set(planner.weights.evaluated_slots())
                ]
                tree = planner.tree
                tree_edges = [
                    (tree.bp[v], v) for v in range(geom.graph.vertex_count)
                    if tree.bp[v] is not None and tree.rhs[v] < INF
                ]
                report.snapshots.append(EpisodeSnapshot(
                    scenario=spec.name,
                    planner=label,
                    episode=episode,
                    world=world,
                    evaluated=evaluated,
                    expanded=planner.tree.pop_log[pop_mark:],
                    tree_edges=tree_edges,
                    path=result.path,
                ))
    return report


def write_report_csv(report: BenchReport, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([
                row.scenario,
                row.planner,
                row.episode,
                row.edge_evals,
                row.vertex_expansions,
                row.event_triggers,
                f"{row.path_cost:.12g}",
                "true" if row.solved else "false",
                f"{row.approx_time_ms:.6g}",
                f"{row.wall_ms:.6g}",
            ])


# --- scenario files ---------------------------------------------------------

def _world_from_table(table: dict, version: int) -> World:
    obstacles: list = []
    for rect in table.get("rects", []):
        if len(rect) != 4:
            raise ScenarioError(f"rect needs 4 numbers [x0, y0, x1, y1], got {rect}")
        obstacles.append(Rect(*map(float, rect)))
    for circle in table.get("circles", []):
        if len(circle) != 3:
            raise ScenarioError(f"circle needs 3 numbers [cx, cy, r], got {circle}")
        obstacles.append(Circle(*map(float, circle)))
    unknown = set(table) - {"rects", "circles"}
    if unknown:
        raise ScenarioError(f"unknown scene keys: {sorted(unknown)}")
    return World(tuple(obstacles), version)


def load_scenario(path: Path) -> ScenarioSpec:
    """Parse and validate a TOML scenario file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: invalid TOML: {exc}") from exc
    try:
        graph_tbl = data["graph"]
        spec = ScenarioSpec(
            name=str(data.get("name", path.stem)),
            sampling=str(graph_tbl["sampling"]),
            vertices=int(graph_tbl["vertices"]),
            radius=float(graph_tbl["radius"]),
            start=(float(graph_tbl["start"][0]), float(graph_tbl["start"][1])),
            goal=(float(graph_tbl["goal"][0]), float(graph_tbl["goal"][1])),
            scenes=[
                _world_from_table(scene, i) for i, scene in enumerate(data.get("scenes", []))
            ],
            planners=[
                PlannerSpec(
                    algorithm=str(p["algorithm"]),
                    event=str(p.get("event", "shortest_path")),
                    alpha=int(p.get("alpha", 1)),
                    epsilon1=float(p.get("epsilon1", 1.0)),
                    epsilon2=float(p.get("epsilon2", 1.0)),
                    label=p.get("label"),
                )
                for p in data.get("planners", [])
            ],
            collision_step=float(data.get("collision_step", 0.01)),
            eval_busy_wait=float(data.get("eval_busy_wait", 0.0)),
            approx_eval_ms=float(data.get("approx_eval_ms", 0.20)),
            approx_expand_ms=float(data.get("approx_expand_ms", 0.86)),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{path}: bad scenario schema: {exc!r}") from exc
    spec.validate()
    return spec


def builtin_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (e.g. 'fig3-analog')."""
    from importlib.resources import files

    candidate = files("lgls").joinpath("scenarios", name.replace("-", "_") + ".toml")
    return Path(str(candidate))

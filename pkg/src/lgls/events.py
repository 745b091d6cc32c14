"""Pause predicates toggling between tree repair and edge evaluation.

An event is checked each time a vertex turns consistent during tree
repair; firing hands the subpath to that vertex over for evaluation.
Every event must guarantee that, on firing, the subpath either ends at
the goal or carries at least one unevaluated edge — otherwise the
evaluate-repair loop cannot make progress.  The two shipped events span
the lookahead spectrum: ShortestPath repairs all the way to the goal
before evaluating anything (infinite lookahead), ConstantDepth pauses
after a fixed number of unevaluated edges (depth 1 is the one-step
lookahead of lazy weighted A*).
"""
from __future__ import annotations


class ShortestPathEvent:
    """Fire only when the goal itself turns consistent."""

    name = "shortest_path"

    def triggered(self, v: int, tree) -> bool:
        return v == tree.goal

    def __repr__(self):
        return "ShortestPathEvent()"


class ConstantDepthEvent:
    """Fire when the subpath to the fresh vertex carries exactly ``depth``
    unevaluated edges, or when the vertex is the goal.

    The unevaluated edges are counted by walking the backpointer chain
    at check time; caching per-vertex counts is subtle under tree
    rewiring and unnecessary at the graph sizes this targets.
    """

    name = "constant_depth"

    def __init__(self, depth: int):
        if depth < 1:
            raise ValueError(f"depth must be >= 1, got {depth}")
        self.depth = depth

    def triggered(self, v: int, tree) -> bool:
        if v == tree.goal:
            return True
        path = tree.extract_path(v)
        unevaluated = 0
        for u, w in zip(path, path[1:]):
            if not tree.weights.is_evaluated(u, w):
                unevaluated += 1
        return unevaluated == self.depth

    def __repr__(self):
        return f"ConstantDepthEvent(depth={self.depth})"


def make_event(name: str, alpha: int = 1):
    """Event factory for scenario files and CLI flags."""
    if name == "shortest_path":
        return ShortestPathEvent()
    if name == "constant_depth":
        return ConstantDepthEvent(alpha)
    raise ValueError(f"unknown event {name!r}")

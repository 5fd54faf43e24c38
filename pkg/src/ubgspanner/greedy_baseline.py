"""The classical sequential greedy t-spanner."""
from __future__ import annotations

from .graph_core import WeightedGraph, bounded_dijkstra


def greedy_order(g: WeightedGraph) -> list[tuple[int, int, float]]:
    """Edges by non-decreasing length, ties by (u, v)."""
    return sorted(g.edges(), key=lambda e: (e[2], e[0], e[1]))


def seq_greedy(g: WeightedGraph, t: float, trace: list | None = None) -> set[tuple[int, int]]:
    """Keep an edge iff the partial spanner has no path of length <= t*|uv|.

    Each query is a fresh Dijkstra bounded by t*|uv|.  When ``trace`` is a
    list, every examined edge is appended as ``(u, v, w, added)``.
    """
    if t < 1.0:
        raise ValueError(f"stretch t={t} must be >= 1")
    sp = WeightedGraph(g.n)
    kept: set[tuple[int, int]] = set()
    for u, v, w in greedy_order(g):
        bound = t * w
        reach = bounded_dijkstra(sp.adj.__getitem__, u, bound, targets=(v,))
        added = reach.get(v, float("inf")) > bound
        if added:
            sp.add_edge(u, v, w)
            kept.add((u, v))
        if trace is not None:
            trace.append((u, v, w, added))
    return kept

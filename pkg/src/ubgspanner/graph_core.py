"""Weighted undirected graphs and the shortest-path / MST primitives on them."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

INF = math.inf


class GraphError(ValueError):
    pass


class WeightedGraph:
    """Symmetric adjacency: ``adj[u][v] == adj[v][u] == w(u, v) > 0``."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int):
        self.n = n
        self.adj: list[dict[int, float]] = [dict() for _ in range(n)]

    @classmethod
    def from_edges(cls, n: int, weighted: Iterable) -> "WeightedGraph":
        """``weighted`` yields ``((u, v), w)`` or ``(u, v, w)`` items."""
        g = cls(n)
        for item in weighted:
            if len(item) == 2:
                (u, v), w = item
            else:
                u, v, w = item
            g.add_edge(u, v, w)
        return g

    def add_edge(self, u: int, v: int, w: float) -> None:
        if u == v:
            raise GraphError(f"self-loop at {u}")
        if not (w > 0.0 and math.isfinite(w)):
            raise GraphError(f"edge ({u}, {v}) has non-positive or infinite weight {w}")
        self.adj[u][v] = w
        self.adj[v][u] = w

    def remove_edge(self, u: int, v: int) -> None:
        del self.adj[u][v]
        del self.adj[v][u]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def weight(self, u: int, v: int) -> float:
        return self.adj[u][v]

    def edges(self) -> list[tuple[int, int, float]]:
        return [(u, v, w) for u in range(self.n)
                for v, w in sorted(self.adj[u].items()) if u < v]

    def edge_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u in range(self.n) for v in self.adj[u] if u < v}

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def total_weight(self) -> float:
        return math.fsum(w for _, _, w in self.edges())

    def copy(self) -> "WeightedGraph":
        g = WeightedGraph(self.n)
        g.adj = [dict(a) for a in self.adj]
        return g

    def subgraph(self, edges: Iterable[tuple[int, int]]) -> "WeightedGraph":
        g = WeightedGraph(self.n)
        for u, v in edges:
            g.add_edge(u, v, self.adj[u][v])
        return g

    def to_csr(self) -> csr_matrix:
        rows, cols, data = [], [], []
        for u, nbrs in enumerate(self.adj):
            for v, w in nbrs.items():
                rows.append(u)
                cols.append(v)
                data.append(w)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


@dataclass
class ShortestPathResult:
    source: int
    dist: list[float]
    parent: list[int | None]

    def path_to(self, v: int) -> list[int]:
        if self.dist[v] == INF:
            return []
        path = [v]
        while path[-1] != self.source:
            path.append(self.parent[path[-1]])
        return path[::-1]


def bounded_dijkstra(neighbors: Callable[[int], Mapping[int, float]], source: int,
                     cutoff: float = INF, targets=None) -> dict[int, float]:
    """Settled distances from ``source`` no larger than ``cutoff``.

    ``neighbors(x)`` is only called for settled nodes, which is what lets a
    caller mediate access to remote state.  Stops early once every node in
    ``targets`` is settled.
    """
    dist = {source: 0.0}
    done: dict[int, float] = {}
    heap = [(0.0, source)]
    remaining = set(targets) if targets is not None else None
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done[x] = d
        if remaining is not None:
            remaining.discard(x)
            if not remaining:
                break
        for y, w in neighbors(x).items():
            nd = d + w
            if nd <= cutoff and nd < dist.get(y, INF) and y not in done:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return done


def dijkstra(g: WeightedGraph, source: int, radius_cutoff: float | None = None
             ) -> ShortestPathResult:
    """Exact single-source shortest paths; equal-length ties prefer the
    smaller predecessor id.  Nodes beyond ``radius_cutoff`` get infinity."""
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} out of range")
    cutoff = INF if radius_cutoff is None else radius_cutoff
    dist = [INF] * g.n
    parent: list[int | None] = [None] * g.n
    dist[source] = 0.0
    done = [False] * g.n
    heap = [(0.0, source)]
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y in sorted(g.adj[x]):
            nd = d + g.adj[x][y]
            if nd > cutoff or done[y]:
                continue
            if nd < dist[y] or (nd == dist[y] and parent[y] is not None and x < parent[y]):
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    for v in range(g.n):
        if not done[v]:
            dist[v] = INF
            parent[v] = None
    return ShortestPathResult(source, dist, parent)


def distance_matrix(g: WeightedGraph, sources=None, limit: float = INF) -> np.ndarray:
    """Bulk shortest-path distances (rows = sources), via scipy's csgraph."""
    if g.n == 0:
        return np.zeros((0, 0))
    idx = np.arange(g.n) if sources is None else np.asarray(sources, dtype=int)
    return _csgraph_dijkstra(g.to_csr(), directed=False, indices=idx, limit=limit)


def connected_components(g: WeightedGraph) -> list[set[int]]:
    """Components in order of their smallest node id."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in g.adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def mst_edges(g: WeightedGraph) -> list[tuple[int, int, float]]:
    """Kruskal in (weight, u, v) order; raises on a disconnected graph."""
    ds = _DisjointSet(g.n)
    tree = []
    for w, u, v in sorted((w, u, v) for u, v, w in g.edges()):
        if ds.union(u, v):
            tree.append((u, v, w))
    if g.n > 0 and len(tree) != g.n - 1:
        raise GraphError("graph is disconnected; no spanning tree exists")
    return tree


def mst_weight(g: WeightedGraph) -> float:
    return math.fsum(w for _, _, w in mst_edges(g))


def edge_stretch(g: WeightedGraph, sub: WeightedGraph
                 ) -> tuple[float, tuple[int, int] | None]:
    """Largest ratio sp_sub(u, v) / w(u, v) over the edges of ``g``.

    Checking every edge certifies all pairs: a shortest path in ``g`` is a
    chain of edges, each of which is stretched by at most the maximum.
    """
    if sub.n != g.n:
        raise GraphError("sub must span the same node set")
    for u in range(sub.n):
        for v, w in sub.adj[u].items():
            if v not in g.adj[u]:
                raise GraphError(f"sub edge ({u}, {v}) is not an edge of g")
    worst, witness = -1.0, None
    for u in range(g.n):
        targets = {v for v in g.adj[u] if v > u}
        if not targets:
            continue
        settled = bounded_dijkstra(sub.adj.__getitem__, u, INF, targets)
        for v in sorted(targets):
            ratio = settled.get(v, INF) / g.adj[u][v]
            if ratio > worst:
                worst, witness = ratio, (u, v)
    if witness is None:
        return 1.0, None
    return worst, witness

import math

import numpy as np
import pytest

from ubgspanner.geometry import UbgInstance, generate_instance
from ubgspanner.graph_core import WeightedGraph


def floyd_warshall(g: WeightedGraph) -> np.ndarray:
    """All-pairs distances, cubic and independent of any Dijkstra code."""
    n = g.n
    d = np.full((n, n), math.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, w in g.edges():
        d[u, v] = d[v, u] = min(d[u, v], w)
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


def definitional_greedy(g, t):
    """Recompute all-pairs distances of the partial spanner after every
    insertion and replay the greedy rule."""
    sp = WeightedGraph(g.n)
    kept = set()
    for u, v, w in sorted(g.edges(), key=lambda e: (e[2], e[0], e[1])):
        if floyd_warshall(sp)[u, v] > t * w:
            sp.add_edge(u, v, w)
            kept.add((u, v))
    return kept


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    g = WeightedGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v, float(rng.uniform(0.1, 2.0)))
    return g


def complete_euclidean(n, seed, d=2):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, d))
    g = WeightedGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            g.add_edge(u, v, math.dist(pts[u], pts[v]))
    return pts, g


@pytest.fixture(scope="session")
def inst100():
    return generate_instance(100, 2, 0.7, "all", 7)


@pytest.fixture(scope="session")
def inst_small():
    return generate_instance(40, 2, 0.8, "bernoulli:0.5", 3)


def line_instance(xs, alpha=1.0, edges=None):
    pts = np.array([[x, 0.0] for x in xs])
    inst = UbgInstance.from_points(pts, alpha)
    if edges is not None:
        inst = UbgInstance(d=2, alpha=alpha, points=pts, edges=sorted(edges))
    return inst

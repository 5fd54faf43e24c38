"""Relaxed greedy spanner: length bins processed in phases with lazy updates.

Phase 0 runs the plain greedy on each (clique) component of the shortest
bin.  Every later phase i works against the spanner G'_{i-1} frozen at the
start of the phase:

1. cluster cover of G'_{i-1} with radius delta * W_{i-1};
2. one query edge per cluster pair among the uncovered edges of the bin;
3. cluster graph H_{i-1} approximating G'_{i-1};
4. a query edge is added iff H_{i-1} has no path within t times its length;
5. mutually redundant additions are thinned to a maximal independent set.

The step functions take neighbor accessors rather than graphs so the
distributed simulator can run them on mediated local views.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .geometry import UbgInstance, angle_from_distances
from .graph_core import INF, WeightedGraph, bounded_dijkstra, connected_components
from .greedy_baseline import seq_greedy

# Absolute slack on length comparisons.  Every use leans towards keeping
# an edge, so rounding can never break the stretch certificate.
EPS = 1e-9

Nbrs = Callable[[int], Mapping[int, float]]


class InvariantViolation(RuntimeError):
    """An internal invariant of the construction failed."""


class ModelViolation(ValueError):
    """The input is not a valid alpha-UBG (e.g. a short-edge component that
    is not a clique)."""


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseParams:
    t: float
    t1: float
    delta: float
    theta: float
    r: float
    beta: float
    alpha: float
    n: int
    m: int

    @property
    def t_delta(self) -> float:
        return self.t1 * (1 - 2 * self.delta) / (1 + 6 * self.delta)

    def width(self, i: int) -> float:
        return self.r ** i * self.alpha / self.n

    @property
    def bin_widths(self) -> list[float]:
        return [self.width(i) for i in range(self.m + 1)]

    @property
    def h_hop_bound(self) -> int:
        """Hops of a qualifying cluster-graph path: 2 + ceil(t r / delta)."""
        return 2 + math.ceil(self.t * self.r / self.delta)

    @property
    def g_hop_bound(self) -> int:
        return math.ceil(2 * (2 * self.delta + 1) / self.alpha)

    @property
    def sandwich(self) -> float:
        """Cluster-graph path length over spanner path length, upper bound."""
        return (1 + 6 * self.delta) / (1 - 2 * self.delta)

    def inter_degree_bound(self, d: int) -> float:
        """Packing bound on inter-cluster edges at a center.

        Adjacent centers lie within (2 delta + 1) W of the center and are
        pairwise at least delta W / t apart, so at most
        (1 + 2 t (2 delta + 1) / delta)^d of them fit.
        """
        return (1 + 2 * self.t * (2 * self.delta + 1) / self.delta) ** d

    def t2_window(self) -> tuple[float, float]:
        """Half-open window [1, hi) of leapfrog factors the weight argument
        supports for these parameters."""
        hi = min((self.t_delta + 1) / self.r - 1, 2 / self.r, self.t / self.r,
                 2 / self.beta, self.t * self.alpha + 1 / self.beta)
        return 1.0, hi

    def violations(self) -> list[str]:
        out = []
        t, t1, dl, th, r, b = self.t, self.t1, self.delta, self.theta, self.r, self.beta
        if not 1 < t1 < t:
            out.append("need 1 < t1 < t")
        if not 0 < th < math.pi / 4:
            out.append("need 0 < theta < pi/4")
        elif t < 1 / (math.cos(th) - math.sin(th)):
            out.append("need t >= 1/(cos theta - sin theta)")
        if not 0 < dl <= (t - t1) / 4:
            out.append("need 0 < delta <= (t - t1)/4")
        if not dl < (t - 1) / (6 + 2 * t):
            out.append("need delta < (t - 1)/(6 + 2t)")
        if not dl < (t1 - 1) / (6 + 2 * t1):
            out.append("need delta < (t1 - 1)/(6 + 2 t1)")
        if not self.t_delta > 1:
            out.append("need t_delta > 1")
        if not 1 < r < (self.t_delta + 1) / 2:
            out.append("need 1 < r < (t_delta + 1)/2")
        if not 1 < b < 2:
            out.append("need 1 < beta < 2")
        if t * self.alpha < 1 and not b < 1 / (1 - t * self.alpha):
            out.append("need beta < 1/(1 - t alpha)")
        if self.width(self.m) < 1.0:
            out.append("top bin does not reach length 1")
        return out

    def to_dict(self) -> dict:
        return {"t": self.t, "t1": self.t1, "delta": self.delta,
                "theta": self.theta, "r": self.r, "beta": self.beta,
                "alpha": self.alpha, "n": self.n, "m": self.m,
                "t_delta": self.t_delta}


def theta_max(t: float) -> float:
    """Largest angle with t >= 1/(cos theta - sin theta)."""
    return math.acos(1 / (math.sqrt(2) * t)) - math.pi / 4


def derive_params(t: float, alpha: float, n: int) -> PhaseParams:
    if not t > 1:
        raise ValueError(f"stretch t={t} must exceed 1")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha={alpha} must lie in (0, 1]")
    n = max(int(n), 1)
    t1 = (1 + t) / 2
    delta = 0.5 * min((t1 - 1) / (6 + 2 * t1), (t - t1) / 4)
    t_delta = t1 * (1 - 2 * delta) / (1 + 6 * delta)
    r = (1 + (t_delta + 1) / 2) / 2
    theta = min(max(0.95 * theta_max(t), 1e-12), math.pi / 4 * 0.999)
    cap = 2.0 if t * alpha >= 1 else min(2.0, 1 / (1 - t * alpha))
    beta = (1 + cap) / 2
    m = max(0, math.ceil(math.log(n / alpha) / math.log(r)))
    while r ** m * alpha / n < 1.0:
        m += 1
    params = PhaseParams(t=t, t1=t1, delta=delta, theta=theta, r=r, beta=beta,
                         alpha=alpha, n=n, m=m)
    bad = params.violations()
    if bad:
        raise InvariantViolation(f"derived parameters infeasible: {bad}")
    return params


# ---------------------------------------------------------------------------
# binning and the short-edge phase
# ---------------------------------------------------------------------------

def bin_index(length: float, params: PhaseParams) -> int:
    """Index i with length in (W_{i-1}, W_i]; 0 for (0, alpha/n]."""
    if length > 1.0:
        raise ModelViolation(f"edge length {length} exceeds 1")
    w0 = params.width(0)
    if length <= w0:
        return 0
    i = max(1, math.ceil(math.log(length / w0) / math.log(params.r)))
    while i > 1 and length <= params.width(i - 1):
        i -= 1
    while length > params.width(i):
        i += 1
    return i


def bin_edges(inst: UbgInstance, params: PhaseParams) -> list[list[tuple[int, int]]]:
    bins: list[list[tuple[int, int]]] = [[] for _ in range(params.m + 1)]
    for e, w in sorted(inst.lengths.items()):
        bins[bin_index(w, params)].append(e)
    return bins


def process_short_edges(inst: UbgInstance, e0: Iterable[tuple[int, int]], t: float
                        ) -> set[tuple[int, int]]:
    """Greedy t-spanner of each component of the shortest bin.

    Raises ModelViolation when a component does not induce a clique in G.
    """
    lengths = inst.lengths
    g0 = WeightedGraph.from_edges(inst.n, ((e, lengths[e]) for e in e0))
    kept: set[tuple[int, int]] = set()
    for comp in connected_components(g0):
        if len(comp) > 1:
            kept |= short_component_spanner(sorted(comp), g0.adj.__getitem__,
                                            lambda u, v: (min(u, v), max(u, v)) in lengths, t)
    return kept


def short_component_spanner(comp: list[int], e0_nbrs: Nbrs,
                            is_g_edge: Callable[[int, int], bool], t: float
                            ) -> set[tuple[int, int]]:
    for i, u in enumerate(comp):
        for v in comp[i + 1:]:
            if not is_g_edge(u, v):
                raise ModelViolation(
                    f"short-edge component {comp[:8]}... is not a clique: "
                    f"({u}, {v}) missing")
    local = {v: k for k, v in enumerate(comp)}
    sub = WeightedGraph(len(comp))
    for u in comp:
        for v, w in e0_nbrs(u).items():
            if u < v:
                sub.add_edge(local[u], local[v], w)
    return {(min(comp[a], comp[b]), max(comp[a], comp[b]))
            for a, b in seq_greedy(sub, t)}


# ---------------------------------------------------------------------------
# spanner state and cluster cover
# ---------------------------------------------------------------------------

@dataclass
class PhaseTrace:
    i: int
    queried: list = field(default_factory=list)
    answers: list = field(default_factory=list)
    removed: list = field(default_factory=list)


class SpannerState:
    """The growing edge set G'_i with its per-phase trace."""

    def __init__(self, n: int):
        self.graph = WeightedGraph(n)
        self.phase_index = -1
        self.trace: list[PhaseTrace] = []

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def kept_edges(self) -> set[tuple[int, int]]:
        return self.graph.edge_set()

    def nbrs(self, x: int) -> dict[int, float]:
        return self.graph.adj[x]

    def add(self, u: int, v: int, w: float) -> None:
        self.graph.add_edge(u, v, w)


@dataclass
class ClusterCover:
    centers: list[int]
    member_of: list[int]
    dist_to_center: list[float]
    radius: float

    @property
    def members(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {c: [] for c in self.centers}
        for x, c in enumerate(self.member_of):
            out[c].append(x)
        return out

    def is_center(self, x: int) -> bool:
        return self.member_of[x] == x


def compute_cluster_cover(spanner: SpannerState | WeightedGraph, radius: float) -> ClusterCover:
    """Smallest uncovered id becomes a center and claims every uncovered
    node within spanner distance ``radius``."""
    g = spanner.graph if isinstance(spanner, SpannerState) else spanner
    if not radius > 0:
        raise ValueError("cluster radius must be positive")
    n = g.n
    member_of = [-1] * n
    dist = [INF] * n
    centers = []
    for c in range(n):
        if member_of[c] != -1:
            continue
        centers.append(c)
        for x, d in bounded_dijkstra(g.adj.__getitem__, c, radius).items():
            if member_of[x] == -1:
                member_of[x] = c
                dist[x] = d
    return ClusterCover(centers, member_of, dist, radius)


# ---------------------------------------------------------------------------
# query selection
# ---------------------------------------------------------------------------

def covering_witness(u: int, v: int, d_uv: float, kept_nbrs: Nbrs, g_nbrs: Nbrs,
                     alpha: float, theta: float) -> tuple[int, int] | None:
    """(p, z) with {p, z} kept, |qz| <= alpha and angle(q p z) <= theta for
    {p, q} = {u, v}; None if the edge is not covered."""
    for p, q in ((u, v), (v, u)):
        q_nbrs = g_nbrs(q)
        for z, d_pz in sorted(kept_nbrs(p).items()):
            if z == q:
                continue
            d_qz = q_nbrs.get(z)
            if d_qz is None or d_qz > alpha:
                continue
            if angle_from_distances(d_uv, d_pz, d_qz) <= theta:
                return p, z
    return None


def is_covered_edge(edge: tuple[int, int], spanner: SpannerState, params: PhaseParams,
                    inst: UbgInstance) -> bool:
    u, v = edge
    g_adj = inst_adjacency(inst)
    return covering_witness(u, v, inst.length(u, v), spanner.nbrs,
                            g_adj.__getitem__, params.alpha, params.theta) is not None


def inst_adjacency(inst: UbgInstance) -> list[dict[int, float]]:
    cache = getattr(inst, "_adj_cache", None)
    if cache is None:
        cache = inst.graph().adj
        inst._adj_cache = cache
    return cache


def query_objective(t: float, length: float, dist_x: float, dist_y: float) -> float:
    return t * length - dist_x - dist_y


@dataclass
class QuerySelection:
    queries: dict[tuple[int, int], tuple[int, int]]
    covered: list[tuple[int, int]]
    candidates: dict[tuple[int, int], list[tuple[int, int]]]

    @property
    def query_edges(self) -> list[tuple[int, int]]:
        return sorted(self.queries.values())

    def per_cluster_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for a, b in self.queries:
            counts[a] = counts.get(a, 0) + 1
            counts[b] = counts.get(b, 0) + 1
        return counts


def select_query_edges(bin_i: Iterable[tuple[int, int]], cover: ClusterCover,
                       spanner: SpannerState, params: PhaseParams,
                       inst: UbgInstance) -> QuerySelection:
    g_adj = inst_adjacency(inst)
    lengths = inst.lengths
    covered = []
    candidates: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for u, v in sorted(bin_i):
        d_uv = lengths[(u, v)]
        if covering_witness(u, v, d_uv, spanner.nbrs, g_adj.__getitem__,
                            params.alpha, params.theta) is not None:
            covered.append((u, v))
            continue
        a, b = cover.member_of[u], cover.member_of[v]
        if a == b:
            raise InvariantViolation(
                f"bin edge ({u}, {v}) has both endpoints in cluster {a}")
        candidates.setdefault((min(a, b), max(a, b)), []).append((u, v))
    queries = {}
    for pair, edges in candidates.items():
        queries[pair] = pick_query(edges, params.t, lengths.__getitem__,
                                   cover.dist_to_center.__getitem__)
    return QuerySelection(queries, covered, candidates)


def pick_query(edges: Iterable[tuple[int, int]], t: float,
               length: Callable[[tuple[int, int]], float],
               center_dist: Callable[[int], float]) -> tuple[int, int]:
    """Minimizer of t|xy| - sp(a, x) - sp(b, y); ties to the smaller edge."""
    return min(edges, key=lambda e: (query_objective(t, length(e), center_dist(e[0]),
                                                     center_dist(e[1])), e))


# ---------------------------------------------------------------------------
# cluster graph
# ---------------------------------------------------------------------------

def center_inter_edges(a: int, members: Iterable[int], kept_nbrs: Nbrs,
                       member_of: Callable[[int], int], w_prev: float, delta: float
                       ) -> dict[int, float]:
    """Inter-cluster edges at center ``a``, weighted by spanner distance.

    {a, b} is an edge if sp(a, b) <= W_{i-1} or a kept edge joins the two
    clusters; either way sp(a, b) <= (2 delta + 1) W_{i-1}, which bounds the
    search.
    """
    reach = bounded_dijkstra(kept_nbrs, a, (2 * delta + 1) * w_prev + EPS)
    inter: dict[int, float] = {}
    for b, d in reach.items():
        if b != a and d <= w_prev and member_of(b) == b:
            inter[b] = d
    for p in members:
        for q in kept_nbrs(p):
            b = member_of(q)
            if b != a and b not in inter:
                if b not in reach:
                    raise InvariantViolation(
                        f"clusters {a} and {b} joined by kept edge ({p}, {q}) "
                        f"but centers are farther than (2 delta + 1) W apart")
                inter[b] = reach[b]
    return inter


class ClusterGraph:
    """H_{i-1}: intra edges center-member, inter edges center-center, all
    weighted by exact spanner distance.  Inter edges are computed per
    center on first use."""

    def __init__(self, spanner: SpannerState | WeightedGraph, cover: ClusterCover,
                 w_prev: float, delta: float):
        g = spanner.graph if isinstance(spanner, SpannerState) else spanner
        self._kept = g.adj.__getitem__
        self.cover = cover
        self.w_prev = w_prev
        self.delta = delta
        self._members = cover.members
        self._inter: dict[int, dict[int, float]] = {}

    @property
    def n(self) -> int:
        return len(self.cover.member_of)

    def inter_neighbors(self, a: int) -> dict[int, float]:
        got = self._inter.get(a)
        if got is None:
            got = center_inter_edges(a, self._members[a], self._kept,
                                     self.cover.member_of.__getitem__,
                                     self.w_prev, self.delta)
            self._inter[a] = got
        return got

    def neighbors(self, x: int) -> dict[int, float]:
        cover = self.cover
        c = cover.member_of[x]
        if c != x:
            return {c: cover.dist_to_center[x]}
        out = {m: cover.dist_to_center[m] for m in self._members[x] if m != x}
        out.update(self.inter_neighbors(x))
        return out

    @property
    def intra_edges(self) -> list[tuple[int, int, float]]:
        cov = self.cover
        return [(cov.member_of[x], x, cov.dist_to_center[x])
                for x in range(self.n) if cov.member_of[x] != x]

    @property
    def inter_edges(self) -> list[tuple[int, int, float]]:
        out = []
        for a in self.cover.centers:
            for b, w in sorted(self.inter_neighbors(a).items()):
                if a < b:
                    out.append((a, b, w))
        return out

    def inter_degree(self, a: int) -> int:
        return len(self.inter_neighbors(a))


def build_cluster_graph(spanner: SpannerState | WeightedGraph, cover: ClusterCover,
                        w_prev: float, delta: float) -> ClusterGraph:
    return ClusterGraph(spanner, cover, w_prev, delta)


# ---------------------------------------------------------------------------
# query answering
# ---------------------------------------------------------------------------

def path_search(neighbors: Nbrs, source: int, target: int, cutoff: float
                ) -> tuple[float, int | None]:
    """Shortest source-target distance within ``cutoff`` and its hop count
    (fewest hops among equal-length paths); (inf, None) if out of reach."""
    best = {source: (0.0, 0)}
    done = set()
    heap = [(0.0, 0, source)]
    while heap:
        d, h, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x == target:
            return d, h
        for y, w in neighbors(x).items():
            nd = d + w
            if nd > cutoff or y in done:
                continue
            if (nd, h + 1) < best.get(y, (INF, 0)):
                best[y] = (nd, h + 1)
                heapq.heappush(heap, (nd, h + 1, y))
    return INF, None


@dataclass(frozen=True)
class QueryAnswer:
    edge: tuple[int, int]
    add: bool
    sp_h: float
    hops: int | None


def answer_query(H, edge: tuple[int, int], params: PhaseParams, length: float
                 ) -> QueryAnswer:
    """Add the edge unless the cluster graph has a path within t * |xy|."""
    x, y = edge
    bound = params.t * length
    d, hops = path_search(H.neighbors, x, y, bound)
    add = not d <= bound - EPS
    return QueryAnswer(edge, add, d, hops)


# ---------------------------------------------------------------------------
# redundant edges
# ---------------------------------------------------------------------------

def mutually_redundant(e: tuple[int, int], f: tuple[int, int],
                       sp_h: Callable[[int, int], float],
                       length: Callable[[tuple[int, int]], float], t1: float) -> bool:
    """Each edge has a t1-path through the other (either endpoint pairing)."""
    u, v = e
    le, lf = length(e), length(f)
    for a, b in (f, f[::-1]):
        if (sp_h(u, a) + lf + sp_h(b, v) <= t1 * le - EPS
                and sp_h(a, u) + le + sp_h(v, b) <= t1 * lf - EPS):
            return True
    return False


def greedy_mis(nodes: Iterable, adj: Mapping) -> list:
    """Maximal independent set, scanning nodes in ascending order."""
    chosen, blocked = [], set()
    for x in sorted(nodes):
        if x not in blocked:
            chosen.append(x)
            blocked.add(x)
            blocked.update(adj.get(x, ()))
    return chosen


@dataclass
class Redundancy:
    survivors: list[tuple[int, int]]
    removed: list[tuple[int, int]]
    conflicts: dict[tuple[int, int], set]
    mis: list[tuple[int, int]]


def endpoint_distances(H, points: Iterable[int], cutoff: float
                       ) -> dict[int, dict[int, float]]:
    return {p: bounded_dijkstra(H.neighbors, p, cutoff) for p in sorted(set(points))}


def remove_redundant(added: Iterable[tuple[int, int]], H, params: PhaseParams,
                     length: Callable[[tuple[int, int]], float]) -> Redundancy:
    added = sorted(added)
    if len(added) < 2:
        return Redundancy(list(added), [], {}, [])
    cutoff = params.t1 * max(length(e) for e in added)
    sp = endpoint_distances(H, (p for e in added for p in e), cutoff)

    def sp_h(a, b):
        return sp[a].get(b, INF)

    conflicts: dict[tuple[int, int], set] = {}
    for i, e in enumerate(added):
        for f in added[i + 1:]:
            if mutually_redundant(e, f, sp_h, length, params.t1):
                conflicts.setdefault(e, set()).add(f)
                conflicts.setdefault(f, set()).add(e)
    mis = greedy_mis(conflicts, conflicts)
    keep = set(mis)
    removed = [e for e in conflicts if e not in keep]
    survivors = [e for e in added if e not in conflicts or e in keep]
    return Redundancy(survivors, sorted(removed), conflicts, mis)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

@dataclass
class PhaseMetrics:
    i: int
    bin_size: int
    covered: int = 0
    queries: int = 0
    added: int = 0
    removed: int = 0
    clusters: int = 0
    max_queries_per_cluster: int = 0
    max_h_hops: int = 0

    def to_dict(self) -> dict:
        return {"i": self.i, "bin_size": self.bin_size, "queries": self.queries,
                "added": self.added, "removed": self.removed,
                "covered": self.covered, "clusters": self.clusters,
                "max_queries_per_cluster": self.max_queries_per_cluster,
                "max_h_hops": self.max_h_hops}


@dataclass
class PhaseSnapshot:
    """Everything a checker needs about one phase.  ``before`` is G'_{i-1}
    (a copy), ``after`` the live spanner once the phase is committed."""
    i: int
    params: PhaseParams
    bin_edges: list
    before: WeightedGraph
    after: WeightedGraph
    w_prev: float | None = None
    cover: ClusterCover | None = None
    cluster_graph: ClusterGraph | None = None
    selection: QuerySelection | None = None
    answers: list = field(default_factory=list)
    redundancy: Redundancy | None = None
    added: list = field(default_factory=list)


@dataclass
class RelaxedResult:
    state: SpannerState
    params: PhaseParams
    phases: list[PhaseMetrics]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.state.kept_edges)

    def to_dict(self) -> dict:
        return {"t": self.params.t, "params": self.params.to_dict(),
                "edges": [list(e) for e in self.edges],
                "phases": [p.to_dict() for p in self.phases if p.bin_size]}


def run_relaxed_greedy(inst: UbgInstance, t: float, observer=None,
                       params: PhaseParams | None = None) -> RelaxedResult:
    """Sequential relaxed greedy; ``observer(snapshot)`` runs after each
    nonempty phase."""
    params = params or derive_params(t, inst.alpha, inst.n)
    bins = bin_edges(inst, params)
    lengths = inst.lengths
    state = SpannerState(inst.n)
    phases: list[PhaseMetrics] = []

    before = state.graph.copy() if observer else None
    kept0 = process_short_edges(inst, bins[0], params.t)
    for u, v in sorted(kept0):
        state.add(u, v, lengths[(u, v)])
    state.phase_index = 0
    state.trace.append(PhaseTrace(0, queried=[], answers=[], removed=[]))
    phases.append(PhaseMetrics(0, len(bins[0]), added=len(kept0)))
    if observer and bins[0]:
        observer(PhaseSnapshot(0, params, bins[0], before, state.graph,
                               added=sorted(kept0)))

    for i in range(1, params.m + 1):
        bin_i = bins[i]
        state.phase_index = i
        if not bin_i:
            phases.append(PhaseMetrics(i, 0))
            continue
        w_prev = params.width(i - 1)
        before = state.graph.copy() if observer else None
        cover = compute_cluster_cover(state, params.delta * w_prev)
        selection = select_query_edges(bin_i, cover, state, params, inst)
        H = build_cluster_graph(state, cover, w_prev, params.delta)
        answers = [answer_query(H, e, params, lengths[e]) for e in selection.query_edges]
        added = [a.edge for a in answers if a.add]
        red = remove_redundant(added, H, params, lengths.__getitem__)
        for u, v in red.survivors:
            state.add(u, v, lengths[(u, v)])
        state.trace.append(PhaseTrace(i, selection.query_edges, answers, red.removed))
        counts = selection.per_cluster_counts()
        hops = [a.hops for a in answers if a.hops is not None and not a.add]
        phases.append(PhaseMetrics(
            i, len(bin_i), covered=len(selection.covered),
            queries=len(selection.queries), added=len(added),
            removed=len(red.removed), clusters=len(cover.centers),
            max_queries_per_cluster=max(counts.values(), default=0),
            max_h_hops=max(hops, default=0)))
        if observer:
            # H reads the live spanner lazily, so rebuild it over the frozen copy
            frozen_h = ClusterGraph(before, cover, w_prev, params.delta)
            observer(PhaseSnapshot(i, params, bin_i, before, state.graph, w_prev,
                                   cover, frozen_h, selection, answers, red, added))
    return RelaxedResult(state, params, phases)

"""Lock-step message-passing execution of the relaxed greedy algorithm.

Each node owns a record (its G-neighborhood, incident spanner edges, cluster
role, cluster-graph adjacency).  A protocol step declares a hop radius k; it
costs k communication rounds of neighbor-to-neighbor relay, after which a
node may read the records of every node within k hops of it in G and
nothing else.  Reads go through a ``View`` that raises ``LocalityViolation``
on any access outside the ball, so the locality claims are enforced rather
than assumed.  Writes are committed when the step ends.

Round accounting per nonempty phase:

* cover: gather ceil(2 delta W / alpha), then an id-based MIS on the
  "within delta W" graph with one relay of that radius per exchange;
* query selection: gather 1 + the cover radius, then notify endpoints;
* cluster graph: gather ceil(2 (2 delta + 1) W / alpha);
* queries: gather ceil(2 t W_i / alpha), then one round to tell the
  other endpoint;
* redundancy: gather 1 + ceil(2 t1 W_i / alpha), one exchange so both
  hosts of a conflict agree, the MIS, then one round to notify.

Steps without participants cost nothing, and a phase whose bin is empty
everywhere costs nothing.  Each round is charged 2|E| messages (one per
direction per G-edge); payload sizes are estimated from the records a node
relays in the last round of a gather.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import UbgInstance
from .graph_core import INF, WeightedGraph, bounded_dijkstra
from .relaxed_greedy import (EPS, ClusterCover, InvariantViolation, ModelViolation,
                             PhaseParams, bin_edges, center_inter_edges,
                             covering_witness, derive_params, inst_adjacency,
                             mutually_redundant, path_search, pick_query,
                             short_component_spanner)

STEPS = ("bootstrap", "short_edges", "cover", "select", "cluster_graph",
         "answer", "remove")


class LocalityViolation(RuntimeError):
    """A node read state outside its declared gather radius."""


class DivergenceError(RuntimeError):
    """The run exceeded ``max_rounds``; the partial transcript is attached."""

    def __init__(self, message, transcript):
        super().__init__(message)
        self.transcript = transcript


@dataclass
class SimConfig:
    inst: UbgInstance
    t: float
    params: PhaseParams | None = None
    seed: int = 0
    max_rounds: int = 10_000_000

    def __post_init__(self):
        if self.max_rounds <= 0:
            raise ValueError("max_rounds must be positive")
        if self.params is None:
            self.params = derive_params(self.t, self.inst.alpha, self.inst.n)


@dataclass
class NodeState:
    id: int
    g_adj: dict[int, float]
    kept: dict[int, float] = field(default_factory=dict)
    member_of: int = -1
    center_dist: float = INF
    h_adj: dict[int, float] = field(default_factory=dict)
    queries: list = field(default_factory=list)
    added: dict[int, float] = field(default_factory=dict)

    @property
    def is_center(self) -> bool:
        return self.member_of == self.id

    def words(self) -> int:
        """Record size in words: id plus (neighbor, distance, kept) per G-edge."""
        return 1 + 3 * len(self.g_adj)


class Network:
    """Static topology of G with incrementally grown BFS balls."""

    def __init__(self, adj: list[dict[int, float]]):
        self.adj = adj
        self.n = len(adj)
        self.num_edges = sum(len(a) for a in adj) // 2
        self._hops: dict[int, dict[int, int]] = {}
        self._frontier: dict[int, tuple[int, list[int]]] = {}

    def hops_within(self, u: int, limit: int) -> dict[int, int]:
        """Hop distance from u of every node within ``limit`` hops (the dict
        may also hold farther nodes found earlier)."""
        dist = self._hops.get(u)
        if dist is None:
            dist = {u: 0}
            self._hops[u] = dist
            self._frontier[u] = (0, [u])
        depth, frontier = self._frontier[u]
        while depth < limit and frontier:
            nxt = []
            for x in frontier:
                for y in self.adj[x]:
                    if y not in dist:
                        dist[y] = depth + 1
                        nxt.append(y)
            depth, frontier = depth + 1, nxt
        self._frontier[u] = (depth, frontier)
        return dist

    def ball(self, u: int, hops: int) -> set[int]:
        return {x for x, h in self.hops_within(u, hops).items() if h <= hops}


class View:
    """Mediated read access for one node during one step."""

    __slots__ = ("nodes", "owner", "radius", "_hops", "max_hop")

    def __init__(self, sim: "Simulator", owner: int, radius: int):
        self.nodes = sim.nodes
        self.owner = owner
        self.radius = radius
        self._hops = sim.net.hops_within(owner, radius)
        self.max_hop = 0

    def read(self, x: int) -> NodeState:
        h = self._hops.get(x)
        if h is None or h > self.radius:
            raise LocalityViolation(
                f"node {self.owner} read node {x} beyond its {self.radius}-hop view")
        if h > self.max_hop:
            self.max_hop = h
        return self.nodes[x]

    def kept(self, x: int) -> dict[int, float]:
        return self.read(x).kept

    def g_adj(self, x: int) -> dict[int, float]:
        return self.read(x).g_adj

    def h_adj(self, x: int) -> dict[int, float]:
        return self.read(x).h_adj

    def member_of(self, x: int) -> int:
        return self.read(x).member_of

    def center_dist(self, x: int) -> float:
        return self.read(x).center_dist


def gather_khop(sim: "Simulator", node: int, hops: int) -> View:
    """The view ``node`` holds after ``hops`` relay rounds."""
    if hops < 0:
        raise ValueError("hops must be >= 0")
    return View(sim, node, hops)


def mis_distributed(nodes, adj, relay: int = 1) -> tuple[set, int, int]:
    """Id-based local-maximum MIS.

    Each iteration, an undecided J-node whose id beats every undecided
    J-neighbor joins; the neighbors of joiners withdraw.  An iteration is
    one exchange to announce joins and one to announce withdrawals (the
    last withdrawal announcement is never needed), each relayed over
    ``relay`` rounds.  Returns (independent set, iterations, rounds).
    """
    undecided = set(nodes)
    chosen: set = set()
    iterations = 0
    while undecided:
        iterations += 1
        joins = [x for x in undecided
                 if all(y not in undecided or y < x for y in adj.get(x, ()))]
        if not joins:
            raise InvariantViolation("MIS made no progress")
        chosen.update(joins)
        undecided.difference_update(joins)
        for x in joins:
            undecided.difference_update(adj.get(x, ()))
    rounds = relay * (2 * iterations - 1) if iterations else 0
    return chosen, iterations, rounds


def dj_distance(edge_a, edge_b, sp_h) -> float:
    """Distance between two same-phase additions: the cheaper endpoint
    pairing of cluster-graph distances."""
    if tuple(edge_a) == tuple(edge_b):
        return 0.0
    (ua, va), (ub, vb) = edge_a, edge_b
    return min(sp_h(ua, ub) + sp_h(va, vb), sp_h(ua, vb) + sp_h(va, ub))


# ---------------------------------------------------------------------------
# transcript
# ---------------------------------------------------------------------------

@dataclass
class SimTranscript:
    n: int
    rounds_total: int = 0
    rounds_by_step: dict = field(default_factory=lambda: {s: 0 for s in STEPS})
    rounds_nonempty_phases: int = 0
    max_payload_words: int = 0
    messages_total: int = 0
    round_messages: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    phases: list = field(default_factory=list)
    gathers: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"rounds_total": self.rounds_total,
                "rounds_by_step": dict(self.rounds_by_step),
                "rounds_nonempty_phases": self.rounds_nonempty_phases,
                "max_payload_words": self.max_payload_words,
                "messages_total": self.messages_total,
                "edges": [list(e) for e in self.edges],
                "phases": self.phases}


@dataclass
class DistPhaseSnapshot:
    """Structures of one long-edge phase, for external checking."""
    i: int
    params: PhaseParams
    w_prev: float
    bin_edges: list
    before: WeightedGraph
    cover: ClusterCover
    cluster_graph: "NodeHGraph"
    queries: list
    added: list
    conflicts: dict
    survivors: list
    mis_iterations: int


class NodeHGraph:
    """Cluster graph assembled from the per-node ``h_adj`` records."""

    def __init__(self, nodes):
        self._adj = [dict(s.h_adj) for s in nodes]

    def neighbors(self, x: int) -> dict[int, float]:
        return self._adj[x]

    @property
    def n(self) -> int:
        return len(self._adj)


# ---------------------------------------------------------------------------
# simulator
# ---------------------------------------------------------------------------

class Simulator:

    def __init__(self, cfg: SimConfig, observer=None):
        self.cfg = cfg
        self.params = cfg.params
        self.inst = cfg.inst
        self.net = Network(inst_adjacency(cfg.inst))
        self.nodes = [NodeState(u, dict(self.net.adj[u])) for u in range(self.net.n)]
        self.tr = SimTranscript(self.net.n)
        self.observer = observer
        self._payload_cache: dict[int, int] = {}

    # -- accounting --------------------------------------------------------

    def charge(self, step: str, rounds: int, phase: int | None = None,
               gather_radius: int | None = None) -> None:
        if rounds <= 0:
            return
        tr = self.tr
        per_round = 2 * self.net.num_edges
        tr.rounds_total += rounds
        tr.rounds_by_step[step] += rounds
        if phase is not None and phase > 0:
            tr.rounds_nonempty_phases += rounds
        tr.messages_total += per_round * rounds
        tr.round_messages.extend([per_round] * rounds)
        if gather_radius:
            tr.max_payload_words = max(tr.max_payload_words,
                                       self.payload_words(gather_radius))
        if tr.rounds_total > self.cfg.max_rounds:
            raise DivergenceError(
                f"exceeded max_rounds={self.cfg.max_rounds} in step {step}", tr)

    def payload_words(self, radius: int) -> int:
        """Largest relay message of a ``radius``-hop gather: in its last
        round a node forwards every record within radius - 1 hops."""
        got = self._payload_cache.get(radius)
        if got is None:
            got = 0
            for u in range(self.net.n):
                got = max(got, sum(self.nodes[x].words()
                                   for x in self.net.ball(u, radius - 1)))
            self._payload_cache[radius] = got
        return got

    def record_gather(self, phase: int, step: str, radius: int, views) -> None:
        self.tr.gathers.append({
            "phase": phase, "step": step, "radius": radius, "participants": len(views),
            "max_hop_read": max((v.max_hop for v in views), default=0)})

    # -- driver ------------------------------------------------------------

    def run(self) -> SimTranscript:
        p = self.params
        bins = bin_edges(self.inst, p)
        if self.net.num_edges:
            # every node learns its closed neighborhood with pairwise distances
            self.charge("bootstrap", 1, 0, 1)
        self.short_edges(bins[0])
        for i in range(1, p.m + 1):
            if bins[i]:
                self.long_phase(i, bins[i])
        self.finish()
        return self.tr

    def kept_graph(self) -> WeightedGraph:
        g = WeightedGraph(self.net.n)
        for s in self.nodes:
            for v, w in s.kept.items():
                g.add_edge(s.id, v, w)
        return g

    def finish(self) -> None:
        edges = set()
        for s in self.nodes:
            for v in s.kept:
                if self.nodes[v].kept.get(s.id) != s.kept[v]:
                    raise InvariantViolation(f"asymmetric spanner edge ({s.id}, {v})")
                edges.add((min(s.id, v), max(s.id, v)))
        self.tr.edges = sorted(edges)

    # -- phase 0 -----------------------------------------------------------

    def short_edges(self, e0) -> None:
        if not e0:
            return
        w0 = self.params.width(0)
        t = self.params.t
        participants = sorted({x for e in e0 for x in e})
        views, pending = [], {}
        for u in participants:
            view = gather_khop(self, u, 1)
            views.append(view)

            def e0_nbrs(x, view=view):
                return {y: w for y, w in view.g_adj(x).items() if w <= w0}

            comp, stack = {u}, [u]
            while stack:
                x = stack.pop()
                for y in e0_nbrs(x):
                    if y not in comp:
                        if y not in view.g_adj(u) and y != u:
                            raise ModelViolation(
                                f"short-edge component of {u} reaches {y}, "
                                f"which is not adjacent to it")
                        comp.add(y)
                        stack.append(y)
            kept = short_component_spanner(
                sorted(comp), e0_nbrs, lambda a, b, view=view: b in view.g_adj(a), t)
            pending[u] = {v: self.nodes[u].g_adj[v] for a, b in kept
                          for v in ((b,) if a == u else (a,) if b == u else ())}
        self.record_gather(0, "short_edges", 1, views)
        for u, inc in pending.items():
            self.nodes[u].kept.update(inc)
        self.charge("short_edges", 1, 0)

    # -- long phases ---------------------------------------------------------

    def long_phase(self, i: int, bin_i) -> None:
        p = self.params
        w_prev = p.width(i - 1)
        w_cur = p.width(i)
        rounds_start = self.tr.rounds_total
        for s in self.nodes:
            s.h_adj, s.queries, s.added = {}, [], {}
        before = self.kept_graph() if self.observer else None

        mis_cover = self.cover_step(i, w_prev)
        queries = self.select_step(i, w_prev, bin_i)
        self.cluster_graph_step(i, w_prev)
        added = self.answer_step(i, w_cur, queries)
        conflicts, survivors, mis_rem = self.remove_step(i, w_cur, added)

        self.tr.phases.append({
            "i": i, "bin_size": len(bin_i), "queries": len(queries),
            "added": len(added), "removed": len(added) - len(survivors),
            "clusters": sum(s.is_center for s in self.nodes),
            "mis_iterations_cover": mis_cover, "mis_iterations_remove": mis_rem,
            "rounds": self.tr.rounds_total - rounds_start})
        if self.observer:
            cover = ClusterCover(
                [s.id for s in self.nodes if s.is_center],
                [s.member_of for s in self.nodes],
                [s.center_dist for s in self.nodes], p.delta * w_prev)
            self.observer(DistPhaseSnapshot(
                i, p, w_prev, list(bin_i), before, cover, self._h_snapshot,
                queries, added, conflicts, survivors, mis_rem))

    def cover_step(self, i: int, w_prev: float) -> int:
        p = self.params
        radius = p.delta * w_prev
        hc = cover_hops(p, w_prev)
        balls, views = {}, []
        for u in range(self.net.n):
            view = gather_khop(self, u, hc)
            balls[u] = bounded_dijkstra(view.kept, u, radius)
            views.append(view)
        self.record_gather(i, "cover", hc, views)
        self.charge("cover", hc, i, hc)
        # a J-edge needs both endpoints to see each other within the radius
        adj = {u: {x for x in b if x != u and u in balls[x]} for u, b in balls.items()}
        centers, iters, rounds = mis_distributed(range(self.net.n), adj, hc)
        for u, b in balls.items():
            s = self.nodes[u]
            if u in centers:
                s.member_of, s.center_dist = u, 0.0
            else:
                c = max(x for x in b if x in centers)
                s.member_of, s.center_dist = c, b[c]
        self.charge("cover", rounds, i)
        return iters

    def select_step(self, i: int, w_prev: float, bin_i) -> list:
        p = self.params
        hc = cover_hops(p, w_prev)
        hs = 1 + hc
        # each node knows which of its incident edges fall in this bin
        incident: dict[int, list[int]] = {}
        for x, y in bin_i:
            incident.setdefault(x, []).append(y)
            incident.setdefault(y, []).append(x)
        picks: dict[int, dict] = {}
        views = []
        for a in range(self.net.n):
            if not self.nodes[a].is_center:
                continue
            view = gather_khop(self, a, hs)
            members = [x for x in bounded_dijkstra(view.kept, a, p.delta * w_prev + EPS)
                       if view.member_of(x) == a]
            cands: dict[int, list] = {}
            for x in members:
                g_x = view.g_adj(x)
                for y in incident.get(x, ()):
                    w = g_x[y]
                    e = (x, y) if x < y else (y, x)
                    b = view.member_of(y)
                    if b == a:
                        raise InvariantViolation(
                            f"bin edge {e} has both endpoints in cluster {a}")
                    if covering_witness(e[0], e[1], w, view.kept, view.g_adj,
                                        p.alpha, p.theta) is None:
                        cands.setdefault(b, []).append(e)
            lengths = self.inst.lengths
            picks[a] = {b: pick_query(es, p.t, lengths.__getitem__, view.center_dist)
                        for b, es in cands.items()}
            views.append(view)
        self.record_gather(i, "select", hs, views)
        queries = []
        for a, chosen in picks.items():
            for b, e in chosen.items():
                if picks.get(b, {}).get(a) != e:
                    raise InvariantViolation(
                        f"heads {a} and {b} disagree on the query edge")
                if a < b:
                    queries.append(e)
        queries.sort()
        if views:
            self.charge("select", hs, i, hs)
        if queries:
            for x, y in queries:
                self.nodes[x].queries.append(y)
                self.nodes[y].queries.append(x)
            self.charge("select", hs, i)
        return queries

    def cluster_graph_step(self, i: int, w_prev: float) -> None:
        p = self.params
        hh = math.ceil(2 * ((2 * p.delta + 1) * w_prev + EPS) / p.alpha)
        pending, views = {}, []
        for a in range(self.net.n):
            s = self.nodes[a]
            if not s.is_center:
                pending[a] = {s.member_of: s.center_dist}
                continue
            view = gather_khop(self, a, hh)
            members = [x for x in bounded_dijkstra(view.kept, a, p.delta * w_prev + EPS)
                       if x != a and view.member_of(x) == a]
            out = {x: view.center_dist(x) for x in members}
            out.update(center_inter_edges(a, members + [a], view.kept, view.member_of,
                                          w_prev, p.delta))
            pending[a] = out
            views.append(view)
        self.record_gather(i, "cluster_graph", hh, views)
        for a, adj in pending.items():
            self.nodes[a].h_adj = adj
        self.charge("cluster_graph", hh, i, hh)
        self._h_snapshot = NodeHGraph(self.nodes) if self.observer else None

    def answer_step(self, i: int, w_cur: float, queries) -> list:
        p = self.params
        hq = math.ceil(2 * (p.t * w_cur + EPS) / p.alpha)
        added, views, hops = [], [], []
        for x, y in queries:
            host = max(x, y)
            other = min(x, y)
            view = gather_khop(self, host, hq)
            length = view.g_adj(host)[other]
            bound = p.t * length
            d, h = path_search(view.h_adj, host, other, bound)
            if not d <= bound - EPS:
                added.append((x, y))
            elif h is not None:
                hops.append(h)
            views.append(view)
        self.record_gather(i, "answer", hq, views)
        self.tr.gathers[-1]["max_h_hops"] = max(hops, default=0)
        if views:
            self.charge("answer", hq, i, hq)
        for x, y in added:
            w = self.nodes[x].g_adj[y]
            self.nodes[x].added[y] = w
            self.nodes[y].added[x] = w
        if added:
            self.charge("answer", 1, i)
        return added

    def remove_step(self, i: int, w_cur: float, added):
        p = self.params
        if not added:
            return {}, [], 0
        hr = 1 + math.ceil(2 * (p.t1 * w_cur + EPS) / p.alpha)
        claims, views = {}, []
        for e in added:
            u, v = e
            host = max(u, v)
            view = gather_khop(self, host, hr)
            cutoff = p.t1 * view.g_adj(u)[v]
            sp = {u: bounded_dijkstra(view.h_adj, u, cutoff),
                  v: bounded_dijkstra(view.h_adj, v, cutoff)}

            def sp_h(a, b, sp=sp):
                if a in sp:
                    return sp[a].get(b, INF)
                return sp[b].get(a, INF)

            lengths = {e: view.g_adj(u)[v]}
            mine = set()
            for a in sp[u]:
                for b, w in view.read(a).added.items():
                    f = (min(a, b), max(a, b))
                    if f == e or f in mine:
                        continue
                    lengths[f] = w
                    if mutually_redundant(e, f, sp_h, lengths.__getitem__, p.t1):
                        mine.add(f)
            claims[e] = mine
            views.append(view)
        self.record_gather(i, "remove", hr, views)
        self.charge("remove", hr, i, hr)
        conflicts: dict = {}
        for e, fs in claims.items():
            for f in fs:
                if e in claims.get(f, ()):
                    conflicts.setdefault(e, set()).add(f)
        survivors = list(added)
        iters = 0
        if conflicts:
            # both hosts of a candidate conflict confirm it to each other
            self.charge("remove", hr, i)
            mis, iters, rounds = mis_distributed(conflicts, conflicts, hr)
            self.charge("remove", rounds, i)
            survivors = [e for e in added if e not in conflicts or e in mis]
        for u, v in survivors:
            w = self.nodes[u].g_adj[v]
            self.nodes[u].kept[v] = w
            self.nodes[v].kept[u] = w
        self.charge("remove", 1, i)
        return conflicts, survivors, iters


def cover_hops(params: PhaseParams, w_prev: float) -> int:
    return max(1, math.ceil(2 * (params.delta * w_prev + EPS) / params.alpha))


def run_distributed(cfg: SimConfig, observer=None) -> SimTranscript:
    """Run the protocol to completion; every node ends knowing its incident
    spanner edges."""
    return Simulator(cfg, observer).run()

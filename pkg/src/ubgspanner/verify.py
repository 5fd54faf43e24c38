"""Executable certificates for the spanner and its intermediate structures.

Every checker is read-only and deterministic.  Each returns a
``CheckResult`` whose ``witness`` points at the offending object when the
check fails.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .geometry import UbgInstance
from .graph_core import (INF, GraphError, WeightedGraph, bounded_dijkstra,
                         connected_components, distance_matrix, edge_stretch,
                         mst_weight)
from .relaxed_greedy import PhaseParams, mutually_redundant

TOL = 1e-9


@dataclass
class CheckResult:
    passed: bool
    value: Any = None
    witness: Any = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        out = {"pass": self.passed, "value": _jsonable(self.value),
               "witness": _jsonable(self.witness)}
        if self.detail:
            out["detail"] = self.detail
        return out


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def _spanner_graph(inst: UbgInstance, edges) -> WeightedGraph:
    lengths = inst.lengths
    g = WeightedGraph(inst.n)
    for u, v in edges:
        key = (min(u, v), max(u, v))
        if key not in lengths:
            raise GraphError(f"spanner edge {key} is not an instance edge")
        g.add_edge(u, v, lengths[key])
    return g


# ---------------------------------------------------------------------------
# output properties
# ---------------------------------------------------------------------------

def check_spanner(inst: UbgInstance, spanner_edges, t: float, tol: float = TOL
                  ) -> CheckResult:
    """Pass iff every instance edge is stretched by at most t (+ tol)."""
    try:
        sub = _spanner_graph(inst, spanner_edges)
    except GraphError as exc:
        return CheckResult(False, INF, None, str(exc))
    stretch, witness = edge_stretch(inst.graph(), sub)
    return CheckResult(stretch <= t + tol, stretch, witness)


def check_degree(spanner_edges) -> int:
    deg: dict[int, int] = {}
    for u, v in spanner_edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return max(deg.values(), default=0)


def weight_ratio(inst: UbgInstance, spanner_edges) -> float:
    """w(spanner) / w(MST(G)); infinity when the spanner does not connect
    what G connects."""
    sub = _spanner_graph(inst, spanner_edges)
    if len(connected_components(sub)) != len(connected_components(inst.graph())):
        return INF
    mst = mst_weight(inst.graph())
    if mst == 0.0:
        return 1.0
    return sub.total_weight() / mst


def power_cost(spanner) -> float:
    """Sum over nodes of the longest incident edge.

    ``spanner`` is a WeightedGraph or an iterable of (u, v, w).
    """
    items = spanner.edges() if isinstance(spanner, WeightedGraph) else spanner
    power: dict[int, float] = {}
    for u, v, w in items:
        power[u] = max(power.get(u, 0.0), w)
        power[v] = max(power.get(v, 0.0), w)
    return math.fsum(power.values())


# ---------------------------------------------------------------------------
# leapfrog
# ---------------------------------------------------------------------------

def t2_window(params: PhaseParams) -> tuple[float, float]:
    return params.t2_window()


def pick_t2(params: PhaseParams) -> float | None:
    """Midpoint of the admissible leapfrog window, or None if it is empty."""
    lo, hi = params.t2_window()
    return (lo + hi) / 2 if hi > lo else None


def weight_bands(lengths: dict, alpha: float, beta: float) -> dict[int, list]:
    """F_0 = edges no longer than alpha, F_j = (alpha beta^(j-1), alpha beta^j]."""
    bands: dict[int, list] = {}
    for e, w in sorted(lengths.items()):
        if w <= alpha:
            j = 0
        else:
            j = max(1, math.ceil(math.log(w / alpha) / math.log(beta)))
            while j > 1 and w <= alpha * beta ** (j - 1):
                j -= 1
            while w > alpha * beta ** j:
                j += 1
        bands.setdefault(j, []).append(e)
    return bands


def check_leapfrog(points, segments, t2: float, t: float, max_subset: int = 4
                   ) -> CheckResult:
    """Exhaustive (t2, t)-leapfrog check over ordered subsets of at most
    ``max_subset`` segments.

    For S = (u1v1, ..., usvs) with u1v1 a longest segment the property
    demands t2 |u1v1| < sum_{i>=2} |uivi| + t (sum |vi u(i+1)| + |vs u1|).
    Partial sums only grow, so a branch is cut once it reaches t2 |u1v1|.
    """
    if max_subset > 6:
        raise ValueError("max_subset is limited to 6")
    pts = np.asarray(points, dtype=float)
    segs = sorted({(min(u, v), max(u, v)) for u, v in segments})
    if len(segs) < 2 or max_subset < 2:
        return CheckResult(True, 0, None, "no subset of size >= 2")

    def dist(a, b):
        return math.dist(pts[a], pts[b])

    seg_len = {s: dist(*s) for s in segs}
    checked = 0
    for first in segs:
        top = seg_len[first]
        budget = t2 * top
        others = [s for s in segs if s != first and seg_len[s] <= top]
        for u1, v1 in (first, first[::-1]):
            stack = [((u1, v1), v1, 0.0, (first,))]
            while stack:
                _, tail, partial, used = stack.pop()
                for s in others:
                    if s in used:
                        continue
                    for a, b in (s, s[::-1]):
                        cost = partial + t * dist(tail, a) + seg_len[s]
                        if cost >= budget:
                            continue
                        checked += 1
                        total = cost + t * dist(b, u1)
                        if total <= budget:
                            return CheckResult(False, checked, [list((u1, v1))] + [
                                list(x) for x in used[1:]] + [[a, b]])
                        if len(used) + 1 < max_subset:
                            stack.append((s, b, cost, used + (s,)))
    return CheckResult(True, checked, None)


def check_leapfrog_bands(inst: UbgInstance, spanner_edges, params: PhaseParams,
                         t2: float | None = None, max_subset: int = 4) -> CheckResult:
    """Leapfrog check within each weight band of the spanner; skipped (with
    a pass and a note) when the admissible t2 window is empty."""
    if t2 is None:
        t2 = pick_t2(params)
        if t2 is None:
            return CheckResult(True, None, None, "skipped: empty t2 window")
    lengths = {e: inst.lengths[e] for e in
               ((min(u, v), max(u, v)) for u, v in spanner_edges)}
    bands = weight_bands(lengths, params.alpha, params.beta)
    total = 0
    for j, segs in sorted(bands.items()):
        res = check_leapfrog(inst.points, segs, t2, params.t, max_subset)
        if not res:
            return CheckResult(False, total, {"band": j, "subset": res.witness},
                               f"t2={t2}")
        total += res.value
    return CheckResult(True, total, None, f"t2={t2}, bands={len(bands)}")


# ---------------------------------------------------------------------------
# phase structures
# ---------------------------------------------------------------------------

def check_cluster_cover(cover, spanner: WeightedGraph, radius: float, tol: float = TOL
                        ) -> CheckResult:
    """Every node assigned within ``radius`` of its center; centers pairwise
    farther apart than ``radius``."""
    n = spanner.n
    if len(cover.member_of) != n:
        return CheckResult(False, None, None, "member_of has the wrong length")
    centers = set(cover.centers)
    for x, c in enumerate(cover.member_of):
        if c not in centers:
            return CheckResult(False, None, x, f"node {x} assigned to non-center {c}")
    for c in centers:
        if cover.member_of[c] != c:
            return CheckResult(False, None, c, f"center {c} not its own member")
    members: dict[int, list[int]] = {c: [] for c in centers}
    for x, c in enumerate(cover.member_of):
        members[c].append(x)
    worst = 0.0
    for c in sorted(centers):
        reach = bounded_dijkstra(spanner.adj.__getitem__, c, radius + tol)
        for x in members[c]:
            d = reach.get(x, INF)
            if d > radius + tol:
                return CheckResult(False, d, (c, x), "member outside the radius")
            worst = max(worst, d)
        for b, d in reach.items():
            if b != c and b in centers and d <= radius - tol:
                return CheckResult(False, d, (c, b), "two centers within the radius")
    return CheckResult(True, worst, None)


def check_cluster_graph(H, spanner: WeightedGraph, cover, params: PhaseParams,
                        w_prev: float, d: int, sample_edges=(), samples: int = 50,
                        seed: int = 0, tol: float = TOL) -> CheckResult:
    """Re-derive every cluster-graph weight with an independent all-pairs
    computation and check the inter-edge weight bound, the inter-degree
    bound and the path sandwich L1 <= L2 <= (1+6 delta)/(1-2 delta) L1 on
    sampled bin edges."""
    n = spanner.n
    centers = sorted(cover.centers)
    sp = distance_matrix(spanner)
    bound_w = (2 * params.delta + 1) * w_prev
    bound_deg = params.inter_degree_bound(d)
    max_deg = 0
    max_inter = 0.0
    for x in range(n):
        nbrs = H.neighbors(x)
        c = cover.member_of[x]
        if c != x:
            if set(nbrs) != {c}:
                return CheckResult(False, None, x, "non-center with edges besides its center")
        inter = 0
        for y, w in nbrs.items():
            if abs(w - sp[x, y]) > tol:
                return CheckResult(False, w, (x, y), f"weight differs from sp={sp[x, y]}")
            if c == x and cover.member_of[y] == y:
                inter += 1
                max_inter = max(max_inter, w)
                if w > bound_w + tol:
                    return CheckResult(False, w, (x, y), "inter edge exceeds (2 delta + 1) W")
        max_deg = max(max_deg, inter)
        if inter > bound_deg:
            return CheckResult(False, inter, x, "inter-degree above the packing bound")
    # the defining conditions, checked from the all-pairs matrix
    for a in centers:
        for b in centers:
            if a < b and sp[a, b] <= w_prev - tol and b not in H.neighbors(a):
                return CheckResult(False, sp[a, b], (a, b), "missing inter edge (close centers)")
    for u in range(n):
        for v in spanner.adj[u]:
            a, b = cover.member_of[u], cover.member_of[v]
            if a != b and b not in H.neighbors(a):
                return CheckResult(False, None, (u, v), "missing inter edge (crossing edge)")
    pairs = sorted(sample_edges)
    if len(pairs) > samples:
        rng = np.random.default_rng(seed)
        pairs = [pairs[k] for k in sorted(rng.choice(len(pairs), samples, replace=False))]
    factor = params.sandwich
    worst = 0.0
    for x, y in pairs:
        l1 = sp[x, y]
        l2 = bounded_dijkstra(H.neighbors, x, INF, (y,)).get(y, INF)
        if l1 == INF and l2 == INF:
            continue
        if l1 > l2 + tol or l2 > factor * l1 + tol:
            return CheckResult(False, (l1, l2), (x, y), "path sandwich violated")
        worst = max(worst, l2 / l1)
    return CheckResult(True, {"max_inter_degree": max_deg, "max_inter_weight": max_inter,
                              "max_path_ratio": worst}, None)


def check_mis(nodes, adj, chosen) -> CheckResult:
    """Independent (no two chosen adjacent) and maximal (every other node
    has a chosen neighbor)."""
    chosen = set(chosen)
    for x in sorted(chosen):
        for y in adj.get(x, ()):
            if y in chosen:
                return CheckResult(False, None, (x, y), "not independent")
    for x in sorted(nodes):
        if x not in chosen and not any(y in chosen for y in adj.get(x, ())):
            return CheckResult(False, None, x, "not maximal")
    return CheckResult(True, len(chosen))


def check_no_redundant_pairs(survivors, H, params: PhaseParams,
                             length: Callable) -> CheckResult:
    """No two surviving same-phase additions are mutually redundant."""
    survivors = sorted(survivors)
    if len(survivors) < 2:
        return CheckResult(True, 0)
    pts = sorted({p for e in survivors for p in e})
    sp = {p: bounded_dijkstra(H.neighbors, p) for p in pts}

    def sp_h(a, b):
        return sp[a].get(b, INF)

    for e, f in itertools.combinations(survivors, 2):
        if mutually_redundant(e, f, sp_h, length, params.t1):
            return CheckResult(False, None, (e, f), "surviving redundant pair")
    return CheckResult(True, len(survivors))


def check_dj_metric(edges, sp_h: Callable, tol: float = TOL, max_triples: int = 10_000,
                    seed: int = 0, conflicts=None, jedge_bound: float | None = None
                    ) -> CheckResult:
    """Metric axioms of d_J on a phase's additions; optionally also that
    every conflict pair is within ``jedge_bound``."""
    from .distsim import dj_distance

    edges = sorted(edges)
    k = len(edges)
    dj = [[dj_distance(a, b, sp_h) for b in edges] for a in edges]
    for i in range(k):
        if dj[i][i] != 0.0:
            return CheckResult(False, dj[i][i], edges[i], "d_J(a, a) != 0")
        for j in range(i + 1, k):
            if abs(dj[i][j] - dj[j][i]) > tol:
                return CheckResult(False, (dj[i][j], dj[j][i]), (edges[i], edges[j]),
                                   "d_J not symmetric")
    total = k ** 3
    if total <= max_triples:
        triples = itertools.product(range(k), repeat=3)
    else:
        rng = np.random.default_rng(seed)
        triples = (tuple(x) for x in rng.integers(0, k, size=(max_triples, 3)))
    count = 0
    for a, b, c in triples:
        count += 1
        if dj[a][c] > dj[a][b] + dj[b][c] + tol:
            return CheckResult(False, dj[a][c], (edges[a], edges[b], edges[c]),
                               "triangle inequality violated")
    if conflicts and jedge_bound is not None:
        index = {e: i for i, e in enumerate(edges)}
        for e, fs in conflicts.items():
            for f in fs:
                if dj[index[e]][index[f]] > jedge_bound + tol:
                    return CheckResult(False, dj[index[e]][index[f]], (e, f),
                                       "conflict pair farther than the J-edge bound")
    return CheckResult(True, count)


def check_phase_stretch(inst: UbgInstance, spanner: WeightedGraph, edges, t: float,
                        tol: float = TOL) -> CheckResult:
    """Every listed instance edge has a t-path in ``spanner``."""
    worst, witness = 0.0, None
    by_source: dict[int, list[int]] = {}
    for u, v in edges:
        by_source.setdefault(u, []).append(v)
    for u, vs in sorted(by_source.items()):
        reach = bounded_dijkstra(spanner.adj.__getitem__, u, INF, vs)
        for v in vs:
            ratio = reach.get(v, INF) / inst.length(u, v)
            if ratio > worst:
                worst, witness = ratio, (u, v)
    return CheckResult(worst <= t + tol, worst, witness)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def verification_report(inst: UbgInstance, spanner_edges, t: float) -> dict:
    edges = sorted((min(u, v), max(u, v)) for u, v in spanner_edges)
    report = {"spanner": check_spanner(inst, edges, t).to_dict()}
    ok = report["spanner"]["pass"]
    degree = check_degree(edges)
    report["max_degree"] = {"pass": True, "value": degree, "witness": None}
    if ok:
        ratio = weight_ratio(inst, edges)
        report["weight_ratio"] = CheckResult(math.isfinite(ratio), ratio).to_dict()
        g = _spanner_graph(inst, edges)
        report["power_cost"] = {"pass": True, "value": power_cost(g), "witness": None}
    return report


def report_passed(report: dict) -> bool:
    return all(entry["pass"] for entry in report.values())


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True)

import itertools
import json
import math
import statistics
from dataclasses import replace

import numpy as np
import pytest

from conftest import line_instance
from ubgspanner.geometry import UbgInstance, generate_instance
from ubgspanner.graph_core import WeightedGraph, mst_edges
from ubgspanner.relaxed_greedy import (ClusterCover, build_cluster_graph,
                                       compute_cluster_cover, derive_params,
                                       run_relaxed_greedy)
from ubgspanner.verify import (CheckResult, check_cluster_cover, check_cluster_graph,
                               check_degree, check_dj_metric, check_leapfrog,
                               check_leapfrog_bands, check_mis, check_spanner,
                               dumps_report, pick_t2, power_cost, report_passed,
                               verification_report, weight_bands, weight_ratio)


def triangle():
    return UbgInstance.from_points([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]], 1.0)


# -- spanner ------------------------------------------------------------------

def test_identity_subgraph_is_a_1_spanner(inst_small):
    assert check_spanner(inst_small, inst_small.edges, 1.0)


def test_missing_edge_fails_with_witness():
    inst = triangle()
    res = check_spanner(inst, [(0, 1), (1, 2)], 1.5)
    assert not res and tuple(res.witness) == (0, 2) and res.value == pytest.approx(2.0)
    assert check_spanner(inst, [(0, 1), (1, 2)], 2.0)


def test_foreign_edge_is_a_failure_not_an_exception():
    inst = line_instance([0.0, 0.5, 2.0])
    res = check_spanner(inst, [(0, 2)], 1.5)
    assert not res and "not an instance edge" in res.detail


# -- degree and weight --------------------------------------------------------

def test_degree_examples():
    assert check_degree([]) == 0
    assert check_degree([(0, k) for k in range(1, 5)]) == 4


def test_weight_ratio_of_mst_is_one(inst100):
    tree = [(u, v) for u, v, _ in mst_edges(inst100.graph())]
    assert weight_ratio(inst100, tree) == pytest.approx(1.0)


def test_weight_ratio_of_equilateral_triangle():
    assert weight_ratio(triangle(), triangle().edges) == pytest.approx(1.5)


def test_weight_ratio_disconnected_is_infinite():
    assert weight_ratio(triangle(), [(0, 1)]) == math.inf


# -- power cost ---------------------------------------------------------------

def test_power_cost_examples():
    assert power_cost([(0, 1, 0.4)]) == pytest.approx(0.8)
    assert power_cost([]) == 0.0
    assert power_cost(WeightedGraph(3)) == 0.0


def test_power_cost_brute_force(inst100):
    res = run_relaxed_greedy(inst100, 1.5)
    g = inst100.graph().subgraph(res.edges)
    expected = sum(max(g.adj[u].values(), default=0.0) for u in range(g.n))
    assert power_cost(g) == pytest.approx(expected, rel=1e-12)


# -- leapfrog -----------------------------------------------------------------

def _leapfrog_brute(points, segs, t2, t, max_subset):
    """Every ordered, oriented subset with its first segment a longest one."""
    L = lambda a, b: math.dist(points[a], points[b])
    for k in range(2, max_subset + 1):
        for combo in itertools.permutations(segs, k):
            top = L(*combo[0])
            if any(L(*s) > top for s in combo[1:]):
                continue
            for flips in itertools.product((False, True), repeat=k):
                seq = [s[::-1] if f else s for s, f in zip(combo, flips)]
                rhs = sum(L(*s) for s in seq[1:])
                rhs += t * sum(L(seq[i][1], seq[i + 1][0]) for i in range(k - 1))
                rhs += t * L(seq[-1][1], seq[0][0])
                if not t2 * top < rhs:
                    return False
    return True


def test_single_segment_passes_vacuously():
    assert check_leapfrog([[0, 0], [1, 0]], [(0, 1)], 1.05, 1.5)


def test_far_apart_segments_pass():
    pts = [[0, 0], [0.1, 0], [5, 5], [5.1, 5]]
    assert check_leapfrog(pts, [(0, 1), (2, 3)], 1.05, 1.5)


def test_parallel_close_segments_violate():
    pts = [[0, 0], [1, 0], [0, 0.01], [1, 0.01]]
    res = check_leapfrog(pts, [(0, 1), (2, 3)], 1.05, 1.5)
    assert not res
    assert len(res.witness) == 2


def test_max_subset_is_capped():
    with pytest.raises(ValueError):
        check_leapfrog([[0, 0], [1, 0]], [(0, 1)], 1.05, 1.5, max_subset=7)


@pytest.mark.parametrize("seed", range(8))
def test_leapfrog_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((10, 2))
    segs = sorted({tuple(sorted(rng.choice(10, 2, replace=False).tolist())) for _ in range(5)})
    for t2 in (1.0, 1.2, 1.6):
        got = bool(check_leapfrog(pts, segs, t2, 1.5, max_subset=3))
        assert got == _leapfrog_brute(pts, segs, t2, 1.5, 3)


def test_weight_bands_boundaries():
    bands = weight_bands({(0, 1): 0.5, (0, 2): 0.75, (0, 3): 1.125, (0, 4): 1.2}, 0.5, 1.5)
    assert bands == {0: [(0, 1)], 1: [(0, 2)], 2: [(0, 3)], 3: [(0, 4)]}


def test_relaxed_output_has_leapfrog_property_in_bands():
    inst = generate_instance(30, 2, 0.7, "all", 1)
    res = run_relaxed_greedy(inst, 1.5)
    t2 = pick_t2(res.params)
    assert t2 is not None and 1.0 <= t2
    out = check_leapfrog_bands(inst, res.edges, res.params, max_subset=4)
    assert out and out.value > 0


def test_empty_window_is_skipped_with_note():
    inst = generate_instance(30, 2, 0.7, "all", 1)
    res = run_relaxed_greedy(inst, 1.5)
    params = replace(res.params, beta=2.5)
    assert pick_t2(params) is None
    out = check_leapfrog_bands(inst, res.edges, params)
    assert out and "skipped" in out.detail


# -- cluster structures -------------------------------------------------------

def test_single_cluster_cover_is_valid():
    g = WeightedGraph.from_edges(3, [(0, 1, 0.1), (1, 2, 0.1)])
    assert check_cluster_cover(compute_cluster_cover(g, 1.0), g, 1.0)


def test_injected_close_centers_fail():
    g = WeightedGraph.from_edges(3, [(0, 1, 0.1), (1, 2, 0.1)])
    bad = ClusterCover([0, 1], [0, 1, 1], [0.0, 0.0, 0.1], 0.5)
    res = check_cluster_cover(bad, g, 0.5)
    assert not res and res.witness is not None


def test_member_outside_radius_fails():
    g = WeightedGraph.from_edges(3, [(0, 1, 0.1), (1, 2, 0.9)])
    bad = ClusterCover([0], [0, 0, 0], [0.0, 0.1, 1.0], 0.5)
    assert not check_cluster_cover(bad, g, 0.5)


def test_cluster_graph_with_tampered_weight_fails():
    g = WeightedGraph.from_edges(4, [(0, 1, 0.01), (1, 2, 0.05), (2, 3, 0.01)])
    params = replace(derive_params(1.5, 1.0, 4), delta=0.25)
    cover = compute_cluster_cover(g, 0.25 * 0.05)
    H = build_cluster_graph(g, cover, 0.05, 0.25)
    assert check_cluster_graph(H, g, cover, params, 0.05, 2)

    class Tampered:
        n = H.n
        inter_edges = [(a, b, w * 0.5) for a, b, w in H.inter_edges]
        intra_edges = H.intra_edges

        def neighbors(self, x):
            return {y: w * 0.5 if x in cover.centers and y in cover.centers else w
                    for y, w in H.neighbors(x).items()}

        def inter_neighbors(self, x):
            return {y: w * 0.5 for y, w in H.inter_neighbors(x).items()}

        def inter_degree(self, x):
            return H.inter_degree(x)
    assert not check_cluster_graph(Tampered(), g, cover, params, 0.05, 2)


# -- MIS and metric -----------------------------------------------------------

def test_mis_checker():
    adj = {0: {1}, 1: {0, 2}, 2: {1}}
    assert check_mis(adj, adj, {0, 2})
    assert check_mis(adj, adj, {1})
    assert not check_mis(adj, adj, {0, 1})  # not independent
    assert not check_mis(adj, adj, {0})  # not maximal


def test_dj_metric_detects_triangle_violation():
    table = {}
    for a, b, d in [(0, 2, 0.1), (1, 3, 0.1), (2, 4, 0.1), (3, 5, 0.1), (0, 4, 5.0),
                    (1, 5, 5.0)]:
        table[(a, b)] = table[(b, a)] = d

    def sp(a, b):
        return 0.0 if a == b else table.get((a, b), math.inf)
    res = check_dj_metric([(0, 1), (2, 3), (4, 5)], sp)
    assert not res


def test_dj_metric_holds_for_true_shortest_paths():
    g = WeightedGraph.from_edges(6, [(0, 2, 0.1), (1, 3, 0.1), (2, 4, 0.1), (3, 5, 0.1)])
    from ubgspanner.graph_core import distance_matrix
    D = distance_matrix(g)
    assert check_dj_metric([(0, 1), (2, 3), (4, 5)], lambda a, b: D[a, b])


# -- report -------------------------------------------------------------------

def test_report_shape_and_json(inst100):
    res = run_relaxed_greedy(inst100, 1.5)
    rep = verification_report(inst100, res.edges, 1.5)
    assert set(rep) == {"spanner", "max_degree", "weight_ratio", "power_cost"}
    for entry in rep.values():
        assert {"pass", "value", "witness"} <= set(entry)
    assert report_passed(rep)
    text = dumps_report(rep)
    assert json.loads(text) == json.loads(dumps_report(rep))
    assert text == dumps_report(verification_report(inst100, res.edges, 1.5))


def test_checkers_agree_between_engines(inst100):
    from ubgspanner.distsim import SimConfig, run_distributed
    seq = run_relaxed_greedy(inst100, 1.5)
    dist = run_distributed(SimConfig(inst100, 1.5))
    assert report_passed(verification_report(inst100, seq.edges, 1.5))
    assert report_passed(verification_report(inst100, dist.edges, 1.5))


def test_check_result_truthiness():
    assert CheckResult(True, 1, None) and not CheckResult(False, 1, [0])
    assert set(CheckResult(True, 1, None).to_dict()) == {"pass", "value", "witness"}


# -- boundedness harness ------------------------------------------------------

@pytest.mark.slow
def test_degree_and_weight_do_not_grow_from_50_to_200():
    deg = {50: [], 200: []}
    wr = {50: [], 200: []}
    for n in deg:
        for seed in range(1, 11):
            inst = generate_instance(n, 2, 0.7, "all", seed)
            res = run_relaxed_greedy(inst, 1.5)
            deg[n].append(check_degree(res.edges))
            wr[n].append(weight_ratio(inst, res.edges))
    assert statistics.median(deg[200]) <= 1.5 * statistics.median(deg[50])
    assert statistics.median(wr[200]) <= 1.25 * statistics.median(wr[50])

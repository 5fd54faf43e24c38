"""Estimator-style wrappers: ``fit`` builds the spanner of a point set (or
of a ready-made instance), ``transform`` returns it as a sparse distance
graph, in the manner of ``sklearn.neighbors.RadiusNeighborsTransformer``."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .distsim import SimConfig, run_distributed
from .geometry import UbgInstance, UsageError
from .graph_core import WeightedGraph
from .greedy_baseline import seq_greedy
from .relaxed_greedy import run_relaxed_greedy
from .validation import check_alpha, check_points, check_stretch


class _SpannerTransformer(TransformerMixin, BaseEstimator):
    _strict_stretch = True

    def __init__(self, t=1.5, alpha=1.0, policy="all", seed=0):
        self.t = t
        self.alpha = alpha
        self.policy = policy
        self.seed = seed

    def _instance(self, X) -> UbgInstance:
        if isinstance(X, UbgInstance):
            return X
        pts = check_points(X)
        return UbgInstance.from_points(pts, check_alpha(self.alpha), self.policy,
                                       self.seed)

    def fit(self, X, y=None):
        t = check_stretch(self.t, strict=self._strict_stretch)
        inst = self._instance(X)
        self.instance_ = inst
        self.n_features_in_ = inst.d
        self.edges_ = sorted(self._build(inst, t))
        return self

    def _build(self, inst, t):
        raise NotImplementedError

    def spanner_graph(self) -> WeightedGraph:
        check_is_fitted(self, "edges_")
        return self.instance_.graph().subgraph(self.edges_)

    def transform(self, X):
        """Sparse (n, n) matrix of spanner edge lengths for the fitted points."""
        check_is_fitted(self, "edges_")
        if not isinstance(X, UbgInstance):
            pts = check_points(X)
            if pts.shape != self.instance_.points.shape or not np.array_equal(
                    pts, self.instance_.points):
                raise UsageError("transform only accepts the points seen in fit")
        return self.spanner_graph().to_csr()


class SeqGreedySpanner(_SpannerTransformer):
    """Classical sequential greedy t-spanner (t >= 1)."""

    _strict_stretch = False

    def _build(self, inst, t):
        return seq_greedy(inst.graph(), t)


class RelaxedGreedySpanner(_SpannerTransformer):
    """Phase-based relaxed greedy spanner; exposes ``params_`` and ``phases_``."""

    def _build(self, inst, t):
        res = run_relaxed_greedy(inst, t)
        self.params_ = res.params
        self.phases_ = res.phases
        return res.edges


class DistributedGreedySpanner(_SpannerTransformer):
    """Relaxed greedy run by the round-based simulator; exposes
    ``transcript_`` with the round and message accounting."""

    def __init__(self, t=1.5, alpha=1.0, policy="all", seed=0, max_rounds=10_000_000):
        super().__init__(t=t, alpha=alpha, policy=policy, seed=seed)
        self.max_rounds = max_rounds

    def _build(self, inst, t):
        cfg = SimConfig(inst, t, seed=self.seed, max_rounds=self.max_rounds)
        self.params_ = cfg.params
        self.transcript_ = run_distributed(cfg)
        return self.transcript_.edges

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ubgspanner import (DistributedGreedySpanner, RelaxedGreedySpanner, SeqGreedySpanner,
                        UsageError, generate_instance)
from ubgspanner.verify import check_spanner

ESTIMATORS = [SeqGreedySpanner, RelaxedGreedySpanner, DistributedGreedySpanner]


@pytest.fixture
def points():
    return np.random.default_rng(0).random((40, 2)) * 2.0


@pytest.mark.parametrize("cls", ESTIMATORS)
def test_fit_transform_gives_certified_spanner(cls, points):
    est = cls(t=1.5, alpha=0.8)
    mat = est.fit_transform(points)
    assert mat.shape == (40, 40)
    assert (mat != mat.T).nnz == 0
    assert mat.nnz == 2 * len(est.edges_)
    assert check_spanner(est.instance_, est.edges_, 1.5)
    assert est.n_features_in_ == 2


@pytest.mark.parametrize("cls", ESTIMATORS)
def test_params_roundtrip_and_clone(cls):
    est = cls(t=2.0, alpha=0.6, policy="bernoulli:0.3", seed=4)
    params = est.get_params()
    assert params["t"] == 2.0 and params["policy"] == "bernoulli:0.3"
    copy = clone(est)
    assert copy.get_params() == params and not hasattr(copy, "edges_")


@pytest.mark.parametrize("cls", ESTIMATORS)
def test_transform_before_fit(cls, points):
    with pytest.raises(NotFittedError):
        cls().transform(points)


def test_accepts_a_ready_instance():
    inst = generate_instance(60, 2, 0.7, "all", 2)
    est = RelaxedGreedySpanner(t=1.5).fit(inst)
    assert est.instance_ is inst and est.params_.n == 60 and est.phases_


def test_distributed_exposes_transcript(points):
    est = DistributedGreedySpanner(t=1.5, alpha=0.8).fit(points)
    assert est.transcript_.rounds_total > 0
    assert est.edges_ == est.transcript_.edges


def test_transform_rejects_unseen_points(points):
    est = RelaxedGreedySpanner().fit(points)
    assert est.transform(points).nnz == est.transform(est.instance_).nnz
    with pytest.raises(UsageError):
        est.transform(points[:10])


@pytest.mark.parametrize("kwargs,X", [
    ({"t": 1.0}, None), ({"t": 0.5}, None), ({"alpha": 0.0}, None),
    ({}, np.zeros((5, 1))), ({}, np.array([[0.0, np.nan]]))])
def test_usage_errors(kwargs, X, points):
    with pytest.raises(UsageError):
        RelaxedGreedySpanner(**kwargs).fit(points if X is None else X)


def test_seq_greedy_allows_t1(points):
    est = SeqGreedySpanner(t=1.0).fit(points)
    assert check_spanner(est.instance_, est.edges_, 1.0)

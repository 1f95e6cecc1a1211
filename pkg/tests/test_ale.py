import numpy as np
import pytest

from streamsales.errors import ArgumentError
from streamsales.explain import ale_csv, ale_curve


class _Linear:
    """f(x) = 2 x_j, ignoring every other column."""

    def __init__(self, j):
        self.j = j

    def predict(self, X):
        return 2.0 * np.atleast_2d(np.asarray(X, float))[:, self.j]


class _Constant:
    def predict(self, X):
        return np.full(np.atleast_2d(X).shape[0], 3.0)


def test_constant_model_zero_curve(log_ds):
    curve = ale_curve(_Constant(), log_ds, j=0, k=5)
    np.testing.assert_allclose(curve.accumulated, 0.0, atol=1e-12)
    np.testing.assert_allclose(curve.local_effects, 0.0, atol=1e-12)


def test_linear_model_recovers_slope(log_ds):
    j = 2
    curve = ale_curve(_Linear(j), log_ds, j=j, k=10)
    A = np.column_stack([np.ones(curve.k), curve.edges[1:]])
    slope = np.linalg.lstsq(A, curve.accumulated[1:], rcond=None)[0][1]
    assert slope == pytest.approx(2.0, rel=0.05)


def test_counts_partition_rows(log_ds):
    curve = ale_curve(_Constant(), log_ds, j=1, k=8)
    assert curve.counts.sum() == log_ds.n
    assert np.all(curve.counts > 0)


def test_centering_invariant(log_ds, small_forest):
    curve = ale_curve(small_forest, log_ds, j=3, k=10)
    weighted = np.dot(curve.counts, curve.accumulated[1:])
    assert abs(weighted) < 1e-9 * max(1.0, np.abs(curve.accumulated).max())


def test_edges_cover_feature_range(log_ds):
    j = 4
    curve = ale_curve(_Constant(), log_ds, j=j, k=6)
    col = log_ds.features[:, j]
    assert curve.edges[0] == col.min()
    assert curve.edges[-1] == col.max()
    assert np.all(np.diff(curve.edges) > 0)


def test_few_distinct_values_reduce_bins(log_ds):
    X = log_ds.features.copy()
    X[:, 0] = np.round(X[:, 0] * 2) / 2  # coarse grid of values
    ds = type(log_ds)(schema=log_ds.schema, features=X, target=log_ds.target,
                      row_ids=log_ds.row_ids, transformed=True)
    distinct = len(np.unique(X[:, 0]))
    if distinct >= 20:  # dataset-dependent; only meaningful when coarse
        X[:, 0] = np.floor(X[:, 0])
        ds = type(log_ds)(schema=log_ds.schema, features=X,
                          target=log_ds.target, row_ids=log_ds.row_ids,
                          transformed=True)
    with pytest.warns(UserWarning, match="reducing bins"):
        curve = ale_curve(_Constant(), ds, j=0, k=20)
    assert curve.k < 20
    assert curve.metadata["requested_k"] == 20


def test_constant_feature_rejected(log_ds):
    X = log_ds.features.copy()
    X[:, 5] = 1.0
    ds = type(log_ds)(schema=log_ds.schema, features=X, target=log_ds.target,
                      row_ids=log_ds.row_ids, transformed=True)
    with pytest.raises(ArgumentError, match="constant"):
        ale_curve(_Constant(), ds, j=5)


def test_invalid_arguments(log_ds):
    with pytest.raises(ArgumentError):
        ale_curve(_Constant(), log_ds, j=-1)
    with pytest.raises(ArgumentError):
        ale_curve(_Constant(), log_ds, j=0, k=1)


def test_trajectories_shape_and_consistency(log_ds):
    j = 1
    curve = ale_curve(_Linear(j), log_ds, j=j, k=5, keep_trajectories=True)
    assert curve.trajectories.shape == (log_ds.n, curve.k + 1)
    # for a function of x_j alone, every trajectory equals the shifted curve
    expected = 2.0 * (curve.edges - curve.edges[0]) - curve.center
    np.testing.assert_allclose(curve.trajectories[0], expected, atol=1e-9)


def test_csv_layout(log_ds, small_forest):
    curve = ale_curve(small_forest, log_ds, j=0, k=6)
    lines = ale_csv(curve).strip().splitlines()
    assert lines[0] == ("bin_index,left_edge,right_edge,count,"
                       "local_effect,accumulated_centered")
    assert len(lines) == curve.k + 1
    first = lines[1].split(",")
    assert int(first[0]) == 0
    assert float(first[1]) == curve.edges[0]

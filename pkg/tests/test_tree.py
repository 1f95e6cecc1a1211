import numpy as np
import pytest

from streamsales.errors import ArgumentError
from streamsales.models import DecisionTreeModel, ModelSpec, fit
from streamsales.models.tree import (
    clamp_min_samples_split,
    grow_tree,
    resolve_max_features,
)


def _fit_dt(X, y, **hp):
    return fit(ModelSpec("DT", hp, seed=0), np.asarray(X, float), np.asarray(y, float))


def test_step_data_splits_at_midpoint():
    # brute force over the 3 candidate splits puts the best at 1.5
    model = _fit_dt([[0.0], [1.0], [2.0], [3.0]], [0, 0, 10, 10], max_depth=1)
    tree = model.tree
    root = 0
    assert tree.feature[root] == 0
    assert tree.threshold[root] == pytest.approx(1.5)
    left, right = tree.left[root], tree.right[root]
    assert tree.value[left] == pytest.approx(0.0)
    assert tree.value[right] == pytest.approx(10.0)
    np.testing.assert_allclose(
        model.predict(np.array([[1.4], [1.6]])), [0.0, 10.0]
    )


def test_constant_target_single_leaf():
    model = _fit_dt([[0.0], [5.0], [9.0]], [7, 7, 7])
    assert model.tree.feature[0] == -1
    np.testing.assert_allclose(model.predict(np.array([[123.0]])), [7.0])


def test_max_depth_zero_predicts_mean():
    model = _fit_dt([[0.0], [1.0], [2.0]], [1, 2, 6], max_depth=0)
    np.testing.assert_allclose(model.predict(np.array([[0.0], [99.0]])), [3.0, 3.0])


def test_left_branch_gets_values_at_threshold():
    # rows with x <= s go left
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    model = _fit_dt(X, [0, 0, 10, 10], max_depth=1)
    at_threshold = model.predict(np.array([[1.5]]))
    assert at_threshold[0] == pytest.approx(0.0)


def test_min_samples_leaf_blocks_small_splits():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0.0, 0.0, 0.0, 10.0])
    model = _fit_dt(X, y, min_samples_leaf=2)
    # the only split honoring min_samples_leaf=2 is at 1.5
    assert model.tree.threshold[0] == pytest.approx(1.5)


def test_tie_breaks_lowest_feature_index():
    # identical columns: both features give the same objective everywhere
    X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    model = _fit_dt(X, [0, 0, 10, 10], max_depth=1)
    assert model.tree.feature[0] == 0


def test_deep_tree_fits_training_data_exactly(rng):
    X = rng.normal(size=(80, 3))
    y = rng.normal(size=80)
    model = _fit_dt(X, y)
    np.testing.assert_allclose(model.predict(X), y, atol=1e-12)


def test_predictions_bounded_by_training_targets(rng):
    X = rng.normal(size=(100, 4))
    y = rng.normal(size=100)
    model = _fit_dt(X, y, max_depth=3)
    queries = rng.normal(scale=10.0, size=(50, 4))
    preds = model.predict(queries)
    assert preds.min() >= y.min() and preds.max() <= y.max()


def test_empty_matrix_rejected():
    with pytest.raises(ArgumentError):
        _fit_dt(np.empty((0, 2)), [])


def test_min_samples_leaf_over_n_warns_single_leaf():
    with pytest.warns(UserWarning, match="min_samples_leaf"):
        model = _fit_dt([[0.0], [1.0]], [1.0, 3.0], min_samples_leaf=5)
    np.testing.assert_allclose(model.predict(np.array([[0.0]])), [2.0])


def test_min_samples_split_clamped():
    with pytest.warns(UserWarning, match="clamped"):
        assert clamp_min_samples_split(1) == 2
    assert clamp_min_samples_split(2) == 2


def test_resolve_max_features():
    assert resolve_max_features("all", 30) == 30
    assert resolve_max_features(None, 30) == 30
    assert resolve_max_features("sqrt", 30) == 5
    assert resolve_max_features("log2", 30) == 4
    assert resolve_max_features("sqrt", 1) == 1
    with pytest.raises(ArgumentError):
        resolve_max_features("third", 30)


def test_grow_tree_deterministic_per_seed(rng):
    X = rng.normal(size=(60, 5))
    y = rng.normal(size=60)
    kw = dict(max_depth=6, min_samples_split=2, min_samples_leaf=1,
              max_features_mode="sqrt", random_split=False)
    a = grow_tree(X, y, seed=11, **kw)
    b = grow_tree(X, y, seed=11, **kw)
    np.testing.assert_array_equal(a.feature, b.feature)
    np.testing.assert_array_equal(a.threshold, b.threshold)


def test_leaf_values_are_member_means(rng):
    X = rng.normal(size=(40, 2))
    y = rng.normal(size=40)
    model = _fit_dt(X, y, max_depth=2)
    tree = model.tree
    node_of = tree.predict(X)  # leaf value per training row
    # every leaf's stored value matches the mean of the rows routed to it
    for leaf in np.flatnonzero(tree.feature == -1):
        if tree.count[leaf] == 0:
            continue
        members = np.isclose(node_of, tree.value[leaf])
        if members.any():
            assert tree.value[leaf] == pytest.approx(np.mean(y[members]))

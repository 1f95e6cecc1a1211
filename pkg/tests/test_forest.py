import numpy as np
import pytest

from streamsales.errors import ArgumentError
from streamsales.metrics import compute_metrics
from streamsales.models import ModelSpec, fit


@pytest.fixture(scope="module")
def sine_data():
    rng = np.random.default_rng(314)
    X = rng.uniform(-3, 3, size=(200, 2))
    y = np.sin(X[:, 0]) + 0.1 * rng.normal(size=200)
    X_test = rng.uniform(-3, 3, size=(100, 2))
    y_test = np.sin(X_test[:, 0])
    return X, y, X_test, y_test


def test_single_tree_forest_equals_dt(sine_data):
    X, y, X_test, _ = sine_data
    forest = fit(ModelSpec("RF", {"n_estimators": 1, "bootstrap": False,
                                  "max_features": "all"}, seed=3), X, y)
    dt = fit(ModelSpec("DT", {}, seed=3), X, y)
    np.testing.assert_array_equal(forest.predict(X_test), dt.predict(X_test))


def test_forest_prediction_is_mean_of_trees(sine_data):
    X, y, X_test, _ = sine_data
    forest = fit(ModelSpec("RF", {"n_estimators": 12}, seed=1), X, y)
    per_tree = forest.tree_predictions(X_test)
    assert per_tree.shape == (12, 100)
    np.testing.assert_allclose(forest.predict(X_test), per_tree.mean(axis=0))


def test_forest_deterministic(sine_data):
    X, y, X_test, _ = sine_data
    a = fit(ModelSpec("RF", {"n_estimators": 10}, seed=5), X, y)
    b = fit(ModelSpec("RF", {"n_estimators": 10}, seed=5), X, y)
    np.testing.assert_array_equal(a.predict(X_test), b.predict(X_test))


def test_forest_seed_changes_model(sine_data):
    X, y, X_test, _ = sine_data
    a = fit(ModelSpec("RF", {"n_estimators": 10}, seed=5), X, y)
    b = fit(ModelSpec("RF", {"n_estimators": 10}, seed=6), X, y)
    assert not np.array_equal(a.predict(X_test), b.predict(X_test))


def test_constant_target_constant_prediction():
    X = np.random.default_rng(0).normal(size=(30, 3))
    y = np.full(30, 4.5)
    for alg in ("RF", "ET"):
        model = fit(ModelSpec(alg, {"n_estimators": 5}, seed=0), X, y)
        np.testing.assert_allclose(model.predict(X), 4.5)


def test_extra_trees_within_2x_of_rf(sine_data):
    X, y, X_test, y_test = sine_data
    rf = fit(ModelSpec("RF", {"n_estimators": 50}, seed=2), X, y)
    et = fit(ModelSpec("ET", {"n_estimators": 50}, seed=2), X, y)
    mse_rf = np.mean((rf.predict(X_test) - y_test) ** 2)
    mse_et = np.mean((et.predict(X_test) - y_test) ** 2)
    assert mse_et <= 2.0 * mse_rf


def test_extra_trees_deterministic(sine_data):
    X, y, X_test, _ = sine_data
    a = fit(ModelSpec("ET", {"n_estimators": 8}, seed=9), X, y)
    b = fit(ModelSpec("ET", {"n_estimators": 8}, seed=9), X, y)
    np.testing.assert_array_equal(a.predict(X_test), b.predict(X_test))


def test_bootstrap_changes_trees(sine_data):
    X, y, X_test, _ = sine_data
    with_bs = fit(ModelSpec("RF", {"n_estimators": 5, "bootstrap": True},
                            seed=4), X, y)
    without = fit(ModelSpec("RF", {"n_estimators": 5, "bootstrap": False},
                            seed=4), X, y)
    assert not np.array_equal(with_bs.predict(X_test), without.predict(X_test))


def test_predictions_within_target_range(sine_data):
    X, y, X_test, _ = sine_data
    for alg in ("RF", "ET"):
        model = fit(ModelSpec(alg, {"n_estimators": 10}, seed=1), X, y)
        preds = model.predict(X_test)
        assert preds.min() >= y.min() - 1e-12
        assert preds.max() <= y.max() + 1e-12


def test_zero_estimators_rejected(sine_data):
    X, y, _, _ = sine_data
    with pytest.raises(ArgumentError):
        fit(ModelSpec("RF", {"n_estimators": 0}, seed=0), X, y)


def test_forest_beats_single_tree_out_of_sample():
    rng = np.random.default_rng(271)
    X = rng.uniform(-3, 3, size=(250, 4))
    y = np.sin(X[:, 0]) + 0.5 * X[:, 1] + 0.3 * rng.normal(size=250)
    X_test = rng.uniform(-3, 3, size=(120, 4))
    y_test = np.sin(X_test[:, 0]) + 0.5 * X_test[:, 1]
    rf = fit(ModelSpec("RF", {"n_estimators": 100}, seed=0), X, y)
    dt = fit(ModelSpec("DT", {}, seed=0), X, y)
    m_rf = compute_metrics(y_test + 10, rf.predict(X_test) + 10)
    m_dt = compute_metrics(y_test + 10, dt.predict(X_test) + 10)
    assert m_rf.mse < m_dt.mse

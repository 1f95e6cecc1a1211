"""Contract tests that apply to every algorithm: dispatch, shape checks,
determinism and serialization round-trips."""

import numpy as np
import pytest

from streamsales.errors import ArgumentError
from streamsales.models import (
    ALGORITHMS,
    ModelSpec,
    defaults,
    fit,
    load_model,
    model_from_dict,
    model_to_dict,
    predict,
    save_model,
)

_SMALL_HP = {
    "DT": {"max_depth": 4},
    "RF": {"n_estimators": 5},
    "ET": {"n_estimators": 5},
    "SVR": {"C": 1.0},
    "LR": {},
    "KNN": {"k": 3},
    "AdaBoost": {"n_estimators": 5},
    "GBRT": {"n_estimators": 5},
}


@pytest.fixture(scope="module")
def train_data():
    rng = np.random.default_rng(77)
    X = rng.normal(size=(40, 3))
    y = X[:, 0] + np.sin(X[:, 1]) + 0.1 * rng.normal(size=40)
    return X, y


@pytest.fixture(scope="module")
def fitted(train_data):
    X, y = train_data
    return {
        alg: fit(ModelSpec(alg, _SMALL_HP[alg], seed=17), X, y)
        for alg in ALGORITHMS
    }


def test_algorithm_vocabulary():
    assert ALGORITHMS == ("DT", "RF", "SVR", "ET", "LR", "KNN", "AdaBoost", "GBRT")


def test_unknown_algorithm_rejected():
    with pytest.raises(ArgumentError):
        ModelSpec("MLP", {})


def test_unknown_hyperparameter_rejected():
    with pytest.raises(ArgumentError, match="max_iter"):
        ModelSpec("DT", {"max_iter": 3})


def test_defaults_are_copies():
    d = defaults("RF")
    d["n_estimators"] = -1
    assert defaults("RF")["n_estimators"] != -1


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_predict_length_and_finiteness(fitted, train_data, alg):
    X, _ = train_data
    preds = fitted[alg].predict(X)
    assert preds.shape == (40,)
    assert np.isfinite(preds).all()


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_predict_rejects_wrong_width(fitted, alg):
    with pytest.raises(ArgumentError):
        fitted[alg].predict(np.zeros((5, 7)))


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_predict_accepts_single_row(fitted, train_data, alg):
    X, _ = train_data
    out = fitted[alg].predict(X[0])
    assert out.shape == (1,)


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_refit_is_bit_identical(train_data, alg):
    X, y = train_data
    a = fit(ModelSpec(alg, _SMALL_HP[alg], seed=17), X, y)
    b = fit(ModelSpec(alg, _SMALL_HP[alg], seed=17), X, y)
    np.testing.assert_array_equal(a.predict(X), b.predict(X))


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_serialization_roundtrip_bit_identical(fitted, train_data, tmp_path, alg):
    X, _ = train_data
    model = fitted[alg]
    path = tmp_path / f"{alg}.json"
    save_model(model, path)
    again = load_model(path)
    np.testing.assert_array_equal(model.predict(X), again.predict(X))
    assert again.spec == model.spec


def test_model_dict_version_checked(fitted):
    d = model_to_dict(fitted["DT"])
    d["format_version"] = 99
    with pytest.raises(ArgumentError, match="version"):
        model_from_dict(d)


def test_module_level_predict_matches_method(fitted, train_data):
    X, _ = train_data
    np.testing.assert_array_equal(
        predict(fitted["RF"], X), fitted["RF"].predict(X)
    )

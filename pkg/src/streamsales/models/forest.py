"""Bagged and extremely-randomized tree ensembles (mean-of-trees prediction)."""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError
from .base import FittedModel, ModelSpec, register
from .tree import TreeArrays, grow_tree


class ForestModel(FittedModel):
    def __init__(self, spec: ModelSpec, trees: list[TreeArrays], tree_seeds: list[int],
                 bootstrap: bool, n_features: int):
        super().__init__(spec, n_features)
        self.trees = trees
        self.tree_seeds = list(tree_seeds)
        self.bootstrap = bootstrap

    def _predict(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros(X.shape[0])
        for tree in self.trees:
            acc += tree.predict(X)
        return acc / len(self.trees)

    def tree_predictions(self, X: np.ndarray) -> np.ndarray:
        """(n_trees, n_rows) matrix of per-tree predictions."""
        X = np.asarray(X, dtype=float)
        return np.stack([t.predict(X) for t in self.trees])

    def payload(self) -> dict:
        return {
            "trees": [t.to_payload() for t in self.trees],
            "tree_seeds": self.tree_seeds,
            "bootstrap": self.bootstrap,
        }

    @classmethod
    def from_payload(cls, spec: ModelSpec, n_features: int, payload: dict):
        trees = [TreeArrays.from_payload(t) for t in payload["trees"]]
        return cls(spec, trees, payload["tree_seeds"], payload["bootstrap"], n_features)


class RandomForestModel(ForestModel):
    algorithm = "RF"


class ExtraTreesModel(ForestModel):
    algorithm = "ET"


RF_DEFAULTS = {
    "n_estimators": 100,
    "max_depth": 1 << 30,
    "min_samples_split": 2,
    "min_samples_leaf": 1,
    "max_features": "sqrt",
    "bootstrap": True,
}

ET_DEFAULTS = {**RF_DEFAULTS, "bootstrap": False}


def _fit_ensemble(X, y, spec: ModelSpec, random_split: bool, model_cls):
    hp = spec.resolved()
    n_estimators = int(hp["n_estimators"])
    if n_estimators < 1:
        raise ArgumentError(f"n_estimators must be >= 1, got {n_estimators}")
    n = X.shape[0]
    ss = np.random.SeedSequence(spec.seed)
    tree_seeds = [int(s) for s in ss.generate_state(n_estimators)]
    trees = []
    for t, tree_seed in enumerate(tree_seeds):
        if hp["bootstrap"]:
            rng = np.random.default_rng([spec.seed, t])
            rows = rng.integers(0, n, size=n)
            Xt, yt = X[rows], y[rows]
        else:
            Xt, yt = X, y
        trees.append(
            grow_tree(
                Xt,
                yt,
                max_depth=hp["max_depth"] if hp["max_depth"] is not None else 1 << 30,
                min_samples_split=hp["min_samples_split"],
                min_samples_leaf=min(hp["min_samples_leaf"], n),
                max_features_mode=hp["max_features"],
                random_split=random_split,
                seed=tree_seed,
            )
        )
    return model_cls(spec, trees, tree_seeds, bool(hp["bootstrap"]), X.shape[1])


@register("RF", RF_DEFAULTS, RandomForestModel)
def fit_random_forest(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> RandomForestModel:
    """Bootstrap-aggregated CART trees with per-node random feature subsets."""
    return _fit_ensemble(X, y, spec, random_split=False, model_cls=RandomForestModel)


@register("ET", ET_DEFAULTS, ExtraTreesModel)
def fit_extra_trees(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> ExtraTreesModel:
    """Like RF but trained on the full sample (by default) with one uniform
    random threshold per candidate feature; best random candidate kept."""
    return _fit_ensemble(X, y, spec, random_split=True, model_cls=ExtraTreesModel)

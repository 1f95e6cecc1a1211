"""Boosted tree ensembles: AdaBoost.R2 stumps and gradient-boosted trees."""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError
from .base import FittedModel, ModelSpec, register
from .tree import TreeArrays, grow_tree

ADABOOST_DEFAULTS = {
    "n_estimators": 50,
    "learning_rate": 1.0,
    "loss": "linear",  # linear / square / exponential
    "max_depth": 1,    # stage regressors are stumps
}

GBRT_DEFAULTS = {
    "n_estimators": 100,
    "max_depth": 3,
    "learning_rate": 0.1,
    "min_samples_leaf": 1,
}

_LOSSES = ("linear", "square", "exponential")
_ALPHA_FLOOR = 1e-10


class AdaBoostModel(FittedModel):
    """Stages combined by the weighted median with weights ln(1 / alpha_k)."""

    algorithm = "AdaBoost"

    def __init__(self, spec: ModelSpec, stages: list[TreeArrays],
                 stage_alphas: list[float], n_features: int,
                 metadata: dict | None = None):
        super().__init__(spec, n_features, metadata)
        self.stages = stages
        self.stage_alphas = list(stage_alphas)

    @property
    def stage_weights(self) -> np.ndarray:
        return np.log(1.0 / np.asarray(self.stage_alphas))

    def _predict(self, X: np.ndarray) -> np.ndarray:
        preds = np.stack([t.predict(X) for t in self.stages])  # (K, n)
        w = self.stage_weights
        order = np.argsort(preds, axis=0, kind="stable")
        sorted_w = w[order]
        cdf = np.cumsum(sorted_w, axis=0)
        crossing = cdf >= 0.5 * cdf[-1]
        median_pos = crossing.argmax(axis=0)
        cols = np.arange(X.shape[0])
        return preds[order[median_pos, cols], cols]

    def payload(self) -> dict:
        return {
            "stages": [t.to_payload() for t in self.stages],
            "stage_alphas": self.stage_alphas,
            "metadata": self.metadata,
        }

    @classmethod
    def from_payload(cls, spec: ModelSpec, n_features: int, payload: dict):
        stages = [TreeArrays.from_payload(t) for t in payload["stages"]]
        return cls(spec, stages, payload["stage_alphas"], n_features,
                   payload.get("metadata"))


@register("AdaBoost", ADABOOST_DEFAULTS, AdaBoostModel)
def fit_adaboost(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> AdaBoostModel:
    """AdaBoost.R2 with loss-shaped errors and weighted resampling.

    Each stage fits a depth-limited tree on a seeded resample drawn
    proportionally to the sample weights; a stage whose weighted error
    reaches 0.5 stops the loop. Zero-error stages get alpha clamped at a
    tiny floor and are flagged.
    """
    hp = spec.resolved()
    K = int(hp["n_estimators"])
    if K < 1:
        raise ArgumentError(f"n_estimators must be >= 1, got {K}")
    loss = hp["loss"]
    if loss not in _LOSSES:
        raise ArgumentError(f"unknown loss {loss!r}")
    lr = float(hp["learning_rate"])
    n = X.shape[0]
    w = np.full(n, 1.0 / n)
    stages: list[TreeArrays] = []
    alphas: list[float] = []
    flagged: list[int] = []
    ss = np.random.SeedSequence(spec.seed)
    stage_seeds = ss.generate_state(2 * K)
    for k in range(K):
        rng = np.random.default_rng(stage_seeds[2 * k])
        rows = rng.choice(n, size=n, replace=True, p=w)
        tree = grow_tree(
            X[rows],
            y[rows],
            max_depth=int(hp["max_depth"]),
            min_samples_split=2,
            min_samples_leaf=1,
            max_features_mode="all",
            random_split=False,
            seed=int(stage_seeds[2 * k + 1]),
        )
        pred = tree.predict(X)
        abs_err = np.abs(pred - y)
        max_err = abs_err.max()
        if max_err <= 0:
            e = np.zeros(n)
        elif loss == "linear":
            e = abs_err / max_err
        elif loss == "square":
            e = (abs_err / max_err) ** 2
        else:
            e = 1.0 - np.exp(-abs_err / max_err)
        err = float(np.dot(w, e))
        if err >= 0.5:
            if not stages:
                # keep one stage so the model can predict at all
                stages.append(tree)
                alphas.append(1.0 - _ALPHA_FLOOR)
                flagged.append(k)
            break
        alpha = err / (1.0 - err)
        if alpha < _ALPHA_FLOOR:
            alpha = _ALPHA_FLOOR
            flagged.append(k)
        stages.append(tree)
        alphas.append(alpha)
        w = w * np.power(alpha, lr * (1.0 - e))
        w = w / w.sum()
        if alpha == _ALPHA_FLOOR:
            # perfect stage: remaining iterations cannot improve
            break
    metadata = {"n_stages": len(stages), "flagged_stages": flagged}
    return AdaBoostModel(spec, stages, alphas, X.shape[1], metadata)


class GbrtModel(FittedModel):
    """Initial constant plus shrunken residual trees (additive model)."""

    algorithm = "GBRT"

    def __init__(self, spec: ModelSpec, initial: float, trees: list[TreeArrays],
                 learning_rate: float, n_features: int):
        super().__init__(spec, n_features)
        self.initial = float(initial)
        self.trees = trees
        self.learning_rate = float(learning_rate)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], self.initial)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out

    def staged_predict(self, X: np.ndarray) -> np.ndarray:
        """(M + 1, n) predictions after 0..M stages."""
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape[0], self.initial)
        stages = [out.copy()]
        for tree in self.trees:
            out = out + self.learning_rate * tree.predict(X)
            stages.append(out.copy())
        return np.stack(stages)

    def payload(self) -> dict:
        return {
            "initial": self.initial,
            "learning_rate": self.learning_rate,
            "trees": [t.to_payload() for t in self.trees],
        }

    @classmethod
    def from_payload(cls, spec: ModelSpec, n_features: int, payload: dict):
        trees = [TreeArrays.from_payload(t) for t in payload["trees"]]
        return cls(spec, payload["initial"], trees, payload["learning_rate"], n_features)


@register("GBRT", GBRT_DEFAULTS, GbrtModel)
def fit_gbrt(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> GbrtModel:
    """Squared-error gradient boosting: each tree fits the current residuals."""
    hp = spec.resolved()
    M = int(hp["n_estimators"])
    if M < 0:
        raise ArgumentError(f"n_estimators must be >= 0, got {M}")
    lr = float(hp["learning_rate"])
    initial = float(np.mean(y))
    residual = y - initial
    trees: list[TreeArrays] = []
    ss = np.random.SeedSequence(spec.seed)
    stage_seeds = ss.generate_state(max(M, 1))
    for m in range(M):
        tree = grow_tree(
            X,
            residual,
            max_depth=int(hp["max_depth"]),
            min_samples_split=2,
            min_samples_leaf=int(hp["min_samples_leaf"]),
            max_features_mode="all",
            random_split=False,
            seed=int(stage_seeds[m]),
        )
        residual = residual - lr * tree.predict(X)
        trees.append(tree)
    return GbrtModel(spec, initial, trees, lr, X.shape[1])

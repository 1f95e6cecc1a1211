"""Uniform fit/predict contract over the eight regression algorithms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError

ALGORITHMS = ("DT", "RF", "SVR", "ET", "LR", "KNN", "AdaBoost", "GBRT")

# filled by @register decorators in the algorithm modules
_FITTERS: dict[str, callable] = {}
_DEFAULTS: dict[str, dict] = {}
_MODEL_CLASSES: dict[str, type] = {}


@dataclass(frozen=True)
class ModelSpec:
    """Algorithm tag + hyperparameters + seed; validated against the vocabulary."""

    algorithm: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ArgumentError(f"unknown algorithm {self.algorithm!r}")
        allowed = set(_DEFAULTS.get(self.algorithm, {}))
        if allowed:
            unknown = sorted(set(self.hyperparameters) - allowed)
            if unknown:
                raise ArgumentError(
                    f"{self.algorithm}: unknown hyperparameters {unknown}; "
                    f"allowed: {sorted(allowed)}"
                )

    def resolved(self) -> dict:
        """Hyperparameters with algorithm defaults filled in."""
        hp = dict(_DEFAULTS[self.algorithm])
        hp.update(self.hyperparameters)
        return hp

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "hyperparameters": dict(self.hyperparameters),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(
            algorithm=d["algorithm"],
            hyperparameters=dict(d.get("hyperparameters", {})),
            seed=int(d.get("seed", 0)),
        )


class FittedModel:
    """Immutable fitted predictor; subclasses implement ``_predict``."""

    algorithm: str = ""

    def __init__(self, spec: ModelSpec, n_features: int, metadata: dict | None = None):
        self.spec = spec
        self.n_features = n_features
        self.metadata = dict(metadata or {})

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ArgumentError(
                f"expected {self.n_features} feature columns, got shape {X.shape}"
            )
        out = self._predict(np.ascontiguousarray(X))
        return np.asarray(out, dtype=float)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def payload(self) -> dict:
        """Serializable parameter payload; see :mod:`streamsales.models.serialize`."""
        raise NotImplementedError

    @classmethod
    def from_payload(cls, spec: ModelSpec, n_features: int, payload: dict) -> "FittedModel":
        raise NotImplementedError


def register(algorithm: str, defaults: dict, model_class: type):
    """Decorator binding a fitter function, its defaults and model class."""

    def wrap(fn):
        _FITTERS[algorithm] = fn
        _DEFAULTS[algorithm] = defaults
        _MODEL_CLASSES[algorithm] = model_class
        model_class.algorithm = algorithm
        return fn

    return wrap


def fit(spec: ModelSpec, X: np.ndarray, y: np.ndarray) -> FittedModel:
    """Fit any of the eight algorithms through one entry point."""
    fitter = _FITTERS.get(spec.algorithm)
    if fitter is None:
        raise ArgumentError(f"no fitter registered for {spec.algorithm!r}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise ArgumentError("X must be 2-D")
    if y.shape != (X.shape[0],):
        raise ArgumentError("y length must match X rows")
    return fitter(X, y, spec)


def predict(model: FittedModel, X: np.ndarray) -> np.ndarray:
    return model.predict(X)


def model_class(algorithm: str) -> type:
    return _MODEL_CLASSES[algorithm]


def defaults(algorithm: str) -> dict:
    return dict(_DEFAULTS[algorithm])

"""Ordinary least squares behind the "LR" algorithm tag."""

from __future__ import annotations

import numpy as np

from .base import FittedModel, ModelSpec, register

LR_DEFAULTS = {
    "keep_intercept": True,
    "normalize": False,
    "max_iterations": 1000,  # accepted for vocabulary compatibility; OLS is direct
}


class LinearModel(FittedModel):
    algorithm = "LR"

    def __init__(self, spec: ModelSpec, coefficients: np.ndarray, intercept: float,
                 n_features: int, metadata: dict | None = None):
        super().__init__(spec, n_features, metadata)
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.intercept = float(intercept)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coefficients + self.intercept

    def payload(self) -> dict:
        return {
            "coefficients": self.coefficients.tolist(),
            "intercept": self.intercept,
            "metadata": self.metadata,
        }

    @classmethod
    def from_payload(cls, spec: ModelSpec, n_features: int, payload: dict):
        return cls(spec, np.asarray(payload["coefficients"]), payload["intercept"],
                   n_features, payload.get("metadata"))


@register("LR", LR_DEFAULTS, LinearModel)
def fit_linear(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> LinearModel:
    """Least squares via SVD (minimum-norm on rank-deficient designs).

    With ``normalize`` the columns are standardized before the solve and the
    coefficients mapped back, which leaves predictions unchanged on
    full-rank data.
    """
    hp = spec.resolved()
    n, p = X.shape
    metadata = {}
    if hp["normalize"]:
        # without an intercept, centering would smuggle one back in
        mu = X.mean(axis=0) if hp["keep_intercept"] else np.zeros(p)
        sd = X.std(axis=0)
        sd_safe = np.where(sd > 0, sd, 1.0)
        Xw = (X - mu) / sd_safe
    else:
        mu = np.zeros(p)
        sd_safe = np.ones(p)
        Xw = X

    if hp["keep_intercept"]:
        design = np.column_stack([np.ones(n), Xw])
    else:
        design = Xw

    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        metadata["rank_deficient"] = True
        metadata["rank"] = int(rank)

    if hp["keep_intercept"]:
        intercept_w, coef_w = beta[0], beta[1:]
    else:
        intercept_w, coef_w = 0.0, beta

    coef = coef_w / sd_safe
    intercept = float(intercept_w - np.dot(coef, mu))
    return LinearModel(spec, coef, intercept, p, metadata)

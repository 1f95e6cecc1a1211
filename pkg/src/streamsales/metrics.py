"""Regression error metrics: MAE, MSE and MAPE (as a percentage)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DomainError


@dataclass(frozen=True)
class Metrics:
    mae: float
    mse: float
    mape: float  # percent

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.mae, self.mse, self.mape)

    def get(self, name: str) -> float:
        return {"mae": self.mae, "mse": self.mse, "mape": self.mape}[name]


def compute_metrics(y: np.ndarray, yhat: np.ndarray) -> Metrics:
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if y.shape != yhat.shape or y.ndim != 1 or y.size < 1:
        raise ArgumentError(f"need equal-length vectors, got {y.shape} and {yhat.shape}")
    zero = np.flatnonzero(y == 0)
    if zero.size:
        raise DomainError(f"MAPE undefined: y is zero at row {int(zero[0])}")
    err = y - yhat
    return Metrics(
        mae=float(np.mean(np.abs(err))),
        mse=float(np.mean(err**2)),
        mape=float(np.mean(np.abs(err / y)) * 100.0),
    )


def mean_metrics(parts: list[Metrics]) -> Metrics:
    """Unweighted average of per-fold metrics."""
    if not parts:
        raise ArgumentError("cannot average zero metric sets")
    return Metrics(
        mae=float(np.mean([m.mae for m in parts])),
        mse=float(np.mean([m.mse for m in parts])),
        mape=float(np.mean([m.mape for m in parts])),
    )

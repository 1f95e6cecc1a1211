"""Interventional Shapley attributions: exact subset enumeration and a
permutation-sampling estimator sharing the same value function.

The value of a coalition S for a sample x is the mean model prediction over
composite rows that take x's values on S and a background row's values
everywhere else (marginal replacement).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..data import Dataset, GroupSplit
from ..errors import ArgumentError, CapabilityError, DegenerateError
from ..models import FittedModel, ModelSpec, fit

EXACT_MAX_FEATURES = 15
BACKGROUND_LIMIT = 500


def background_sample(X: np.ndarray, limit: int = BACKGROUND_LIMIT,
                      seed: int = 0) -> np.ndarray:
    """Seeded row subsample (without replacement) used as the background."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ArgumentError("background must be a non-empty 2-D array")
    if X.shape[0] <= limit:
        return X
    rng = np.random.default_rng([seed, X.shape[0]])
    idx = np.sort(rng.choice(X.shape[0], size=limit, replace=False))
    return X[idx]


def _coalition_values(model: FittedModel, x: np.ndarray,
                      background: np.ndarray) -> np.ndarray:
    """val(S) for every subset S, indexed by bit mask."""
    p = x.shape[0]
    vals = np.empty(1 << p)
    composite = np.empty_like(background)
    for mask in range(1 << p):
        composite[:] = background
        for j in range(p):
            if mask >> j & 1:
                composite[:, j] = x[j]
        vals[mask] = float(np.mean(model.predict(composite)))
    return vals


def shapley_exact(model: FittedModel, x: np.ndarray,
                  background: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact Shapley vector by enumerating all 2^p coalitions.

    Returns (phi, base_value) with base_value = mean background prediction,
    so base_value + sum(phi) equals the model's prediction for x.
    """
    x = np.asarray(x, dtype=float).ravel()
    background = np.asarray(background, dtype=float)
    if background.ndim != 2 or background.shape[0] == 0:
        raise ArgumentError("background must be a non-empty 2-D array")
    p = x.shape[0]
    if background.shape[1] != p:
        raise ArgumentError(
            f"sample has {p} features, background has {background.shape[1]}"
        )
    if p > EXACT_MAX_FEATURES:
        raise CapabilityError(
            f"exact enumeration needs 2^{p} coalitions; limited to "
            f"p <= {EXACT_MAX_FEATURES} — use shapley_sampled instead"
        )
    vals = _coalition_values(model, x, background)
    # weight for |S| = s when adding one feature to S
    weights = np.array(
        [math.factorial(s) * math.factorial(p - 1 - s) / math.factorial(p)
         for s in range(p)]
    )
    popcount = np.array([bin(m).count("1") for m in range(1 << p)])
    phi = np.zeros(p)
    for j in range(p):
        bit = 1 << j
        without = np.flatnonzero((np.arange(1 << p) & bit) == 0)
        phi[j] = float(
            np.sum(weights[popcount[without]] * (vals[without | bit] - vals[without]))
        )
    return phi, float(vals[0])


def shapley_sampled(model: FittedModel, x: np.ndarray, background: np.ndarray,
                    n_permutations: int, seed) -> tuple[np.ndarray, float, np.ndarray]:
    """Monte-Carlo Shapley estimate from random feature orderings.

    Each permutation draws one background row and walks the ordering,
    accumulating marginal contributions val(before ∪ {j}) − val(before).
    Returns (phi, base_value, standard_errors).
    """
    x = np.asarray(x, dtype=float).ravel()
    background = np.asarray(background, dtype=float)
    if background.ndim != 2 or background.shape[0] == 0:
        raise ArgumentError("background must be a non-empty 2-D array")
    if n_permutations < 1:
        raise ArgumentError(f"n_permutations must be >= 1, got {n_permutations}")
    p = x.shape[0]
    nb = background.shape[0]
    rng = np.random.default_rng(seed)
    total = np.zeros(p)
    total_sq = np.zeros(p)
    # p + 1 composites per permutation, predicted in one batch
    batch = np.empty((p + 1, p))
    for _ in range(n_permutations):
        b = background[rng.integers(nb)]
        order = rng.permutation(p)
        batch[0] = b
        for step, j in enumerate(order):
            batch[step + 1] = batch[step]
            batch[step + 1, j] = x[j]
        preds = model.predict(batch)
        deltas = np.diff(preds)
        total[order] += deltas
        total_sq[order] += deltas**2
    phi = total / n_permutations
    var = total_sq / n_permutations - phi**2
    stderr = np.sqrt(np.maximum(var, 0.0) / n_permutations)
    base = float(np.mean(model.predict(background)))
    return phi, base, stderr


@dataclass(frozen=True)
class ShapMatrix:
    values: np.ndarray  # (n, p)
    base_value: float
    method: str  # exact | sampled
    feature_names: tuple[str, ...]
    n_permutations: int | None = None
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def shap_matrix(model: FittedModel, ds: Dataset, background: np.ndarray,
                method: str = "sampled", n_permutations: int = 200,
                seed: int = 0) -> ShapMatrix:
    """Attribution vector for every row of the dataset.

    Per-row RNG streams are derived from (seed, row index), so row order
    and any parallel scheduling cannot change the result.
    """
    if method not in ("exact", "sampled"):
        raise ArgumentError(f"unknown method {method!r}")
    background = np.asarray(background, dtype=float)
    p = ds.p
    if method == "exact" and p > EXACT_MAX_FEATURES:
        raise CapabilityError(
            f"exact mode limited to p <= {EXACT_MAX_FEATURES}, got {p}; "
            "use method='sampled'"
        )
    if ds.n == 0:
        raise ArgumentError("dataset has no rows to attribute")
    values = np.empty((ds.n, p))
    if method == "exact":
        for i in range(ds.n):
            values[i], base = shapley_exact(model, ds.features[i], background)
    else:
        for i in range(ds.n):
            values[i], base, _ = shapley_sampled(
                model, ds.features[i], background, n_permutations, seed=[seed, i]
            )
    return ShapMatrix(
        values=values,
        base_value=base,
        method=method,
        feature_names=tuple(ds.schema.predictor_names),
        n_permutations=n_permutations if method == "sampled" else None,
        seed=seed if method == "sampled" else None,
    )


@dataclass(frozen=True)
class GlobalImportance:
    feature_names: tuple[str, ...]
    total_abs: np.ndarray  # sum over samples of |phi_j| (the ranking key)
    mean_abs: np.ndarray
    ranking: tuple[int, ...]  # feature indices, most important first

    def ranked_names(self) -> tuple[str, ...]:
        return tuple(self.feature_names[j] for j in self.ranking)


def global_importance(sm: ShapMatrix) -> GlobalImportance:
    """Rank features by the sum of absolute attributions across samples."""
    total = np.sum(np.abs(sm.values), axis=0)
    mean = total / sm.n
    ranking = tuple(sorted(range(sm.p), key=lambda j: (-total[j], j)))
    return GlobalImportance(sm.feature_names, total, mean, ranking)


def group_importance(spec: ModelSpec, ds: Dataset, split: GroupSplit,
                     train_ratio: float = 0.9, seed: int = 0,
                     method: str = "sampled", n_permutations: int = 200,
                     ) -> tuple[GlobalImportance, GlobalImportance]:
    """Importance computed separately for the female/male row groups.

    Each group gets its own seeded train/test split; the model is refit on
    the train part and attributions are computed on the held-out part.
    """
    if not 0.0 < train_ratio < 1.0:
        raise ArgumentError(f"train_ratio must be in (0, 1), got {train_ratio}")
    out = []
    for g, idx in enumerate((split.female_idx, split.male_idx)):
        if len(idx) < 10:
            raise DegenerateError(
                f"group {g} has {len(idx)} rows; need at least 10 for a "
                f"{train_ratio:.0%} split"
            )
        # keyed by size, not group position: identical groups split identically
        rng = np.random.default_rng([seed, len(idx)])
        perm = idx[rng.permutation(len(idx))]
        n_train = int(round(train_ratio * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1)
        train, test = perm[:n_train], perm[n_train:]
        model = fit(spec, ds.features[train], ds.target[train])
        bg = background_sample(ds.features[train], seed=seed)
        sm = shap_matrix(model, ds.subset(np.sort(test)), bg, method=method,
                         n_permutations=n_permutations, seed=seed)
        out.append(global_importance(sm))
    return out[0], out[1]


@dataclass(frozen=True)
class SummaryPoints:
    """Beeswarm-style data: one (value, rank quantile, phi) triple per cell."""

    feature_names: tuple[str, ...]
    raw_values: np.ndarray  # (n, p)
    rank_quantiles: np.ndarray  # (n, p), in [0, 1]; the color channel
    phi: np.ndarray  # (n, p); the horizontal position
    feature_order: tuple[int, ...]  # plotting order, most important first


def summary_points(sm: ShapMatrix, ds: Dataset) -> SummaryPoints:
    if sm.values.shape != (ds.n, ds.p):
        raise ArgumentError(
            f"attribution matrix {sm.values.shape} does not match dataset "
            f"({ds.n}, {ds.p})"
        )
    quantiles = np.empty((ds.n, ds.p))
    for j in range(ds.p):
        ranks = rankdata(ds.features[:, j], method="average")
        if ds.n == 1:
            quantiles[:, j] = 0.5
        else:
            quantiles[:, j] = (ranks - 1.0) / (ds.n - 1.0)
    order = global_importance(sm).ranking
    return SummaryPoints(
        feature_names=sm.feature_names,
        raw_values=ds.features.copy(),
        rank_quantiles=quantiles,
        phi=sm.values.copy(),
        feature_order=order,
    )


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def shap_matrix_csv(sm: ShapMatrix) -> str:
    lines = [",".join(sm.feature_names) + ",base_value"]
    for row in sm.values:
        lines.append(",".join(repr(float(v)) for v in row) + f",{sm.base_value!r}")
    return "\n".join(lines) + "\n"


def shap_matrix_sidecar(sm: ShapMatrix) -> dict:
    return {
        "method": sm.method,
        "base_value": sm.base_value,
        "n_samples": sm.n,
        "n_features": sm.p,
        "n_permutations": sm.n_permutations,
        "seed": sm.seed,
    }

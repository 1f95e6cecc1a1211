"""Accumulated local effects on a quantile grid.

Bin edges sit at i/K empirical quantiles (first edge = feature minimum,
last = maximum). Each bin's local effect is the mean, over its members, of
the prediction change when the feature moves from the bin's lower to its
upper edge; effects are accumulated and centered by the count-weighted
average so the curve reads as a deviation from the typical effect.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset
from ..errors import ArgumentError
from ..models import FittedModel


@dataclass(frozen=True)
class AleCurve:
    feature_index: int
    feature_name: str
    k: int  # bin count after edge collapse
    edges: np.ndarray  # (k + 1,)
    counts: np.ndarray  # (k,), sums to n
    local_effects: np.ndarray  # (k,)
    accumulated: np.ndarray  # (k + 1,), value at each edge, starts at -center
    center: float  # count-weighted mean subtracted from the raw accumulation
    metadata: dict = field(default_factory=dict)
    trajectories: np.ndarray | None = None  # (n, k + 1) per-sample paths

    @property
    def accumulated_centered(self) -> np.ndarray:
        """Per-bin curve value (at the bin's upper edge)."""
        return self.accumulated[1:]


def _bin_assign(z: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Bin k covers (edges[k], edges[k+1]]; the minimum lands in bin 0."""
    idx = np.searchsorted(edges[1:], z, side="left")
    return np.clip(idx, 0, len(edges) - 2)


def ale_curve(model: FittedModel, ds: Dataset, j: int, k: int = 20,
              keep_trajectories: bool = False) -> AleCurve:
    if not 0 <= j < ds.p:
        raise ArgumentError(f"feature index {j} out of range [0, {ds.p})")
    if k < 2:
        raise ArgumentError(f"need at least 2 bins, got {k}")
    z = ds.features[:, j]
    n = ds.n
    distinct = np.unique(z)
    requested_k = k
    if distinct.size < 2:
        raise ArgumentError(
            f"feature {ds.schema.predictor_names[j]!r} is constant; "
            "no local effects exist"
        )
    if distinct.size < k:
        warnings.warn(
            f"feature has {distinct.size} distinct values; reducing bins "
            f"from {k} to {distinct.size - 1}",
            stacklevel=2,
        )
        k = distinct.size - 1 if distinct.size > 2 else 2
    edges = np.quantile(z, np.arange(k + 1) / k)
    edges[0], edges[-1] = z.min(), z.max()
    # ties in the data can collapse quantiles onto the same edge
    unique_edges = np.unique(edges)
    merged = int(len(edges) - len(unique_edges))
    edges = unique_edges
    bins = _bin_assign(z, edges)
    counts = np.bincount(bins, minlength=len(edges) - 1)
    # a zero-count interval carries no information: drop its upper edge
    while np.any(counts == 0):
        empty = int(np.flatnonzero(counts == 0)[0])
        edges = np.delete(edges, min(empty + 1, len(edges) - 2))
        merged += 1
        bins = _bin_assign(z, edges)
        counts = np.bincount(bins, minlength=len(edges) - 1)
    k = len(edges) - 1

    lo = ds.features.copy()
    hi = ds.features.copy()
    lo[:, j] = edges[bins]
    hi[:, j] = edges[bins + 1]
    per_sample = model.predict(hi) - model.predict(lo)
    local = np.bincount(bins, weights=per_sample, minlength=k) / counts

    accumulated = np.concatenate(([0.0], np.cumsum(local)))
    center = float(np.dot(counts, accumulated[1:]) / n)
    accumulated = accumulated - center

    trajectories = None
    if keep_trajectories:
        base = None
        paths = np.empty((n, k + 1))
        work = ds.features.copy()
        for e in range(k + 1):
            work[:, j] = edges[e]
            pred = model.predict(work)
            if base is None:
                base = pred
            paths[:, e] = pred - base
        trajectories = paths - center

    return AleCurve(
        feature_index=j,
        feature_name=ds.schema.predictor_names[j],
        k=k,
        edges=edges,
        counts=counts,
        local_effects=local,
        accumulated=accumulated,
        center=center,
        metadata={"requested_k": requested_k, "merged_bins": merged},
        trajectories=trajectories,
    )


def ale_csv(curve: AleCurve) -> str:
    lines = ["bin_index,left_edge,right_edge,count,local_effect,accumulated_centered"]
    for b in range(curve.k):
        lines.append(
            f"{b},{float(curve.edges[b])!r},{float(curve.edges[b + 1])!r},"
            f"{int(curve.counts[b])},{float(curve.local_effects[b])!r},"
            f"{float(curve.accumulated[b + 1])!r}"
        )
    return "\n".join(lines) + "\n"

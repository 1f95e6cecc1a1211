"""CART regression trees.

The builder is a flat-array implementation (numba-compiled) shared by the
single decision tree, the two forest variants and both boosters. Splits
minimize the summed squared error of the two child means; candidate
thresholds are midpoints of consecutive distinct sorted values, except in
"random split" mode where one uniform threshold per candidate feature is
drawn. Ties are broken by lowest feature index, then smallest threshold.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import ArgumentError
from .base import FittedModel, ModelSpec, register


@njit(cache=True)
def _build(X, y, max_depth, min_samples_split, min_samples_leaf, mtry, random_split, seed):
    n, p = X.shape
    max_nodes = 2 * n + 1
    feature = np.full(max_nodes, -1, dtype=np.int64)
    threshold = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    value = np.zeros(max_nodes, dtype=np.float64)
    count = np.zeros(max_nodes, dtype=np.int64)

    np.random.seed(seed)
    idx = np.arange(n)
    buf = np.empty(n, dtype=np.int64)
    feats = np.empty(p, dtype=np.int64)

    # stack of (node, start, end, depth)
    stack = np.empty((4 * n + 8, 4), dtype=np.int64)
    stack[0] = (0, 0, n, 0)
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node, start, end, depth = stack[top]
        m = end - start
        s = 0.0
        for i in range(start, end):
            s += y[idx[i]]
        value[node] = s / m
        count[node] = m

        if depth >= max_depth or m < min_samples_split or m < 2 * min_samples_leaf:
            continue
        ymin = y[idx[start]]
        ymax = ymin
        for i in range(start + 1, end):
            v = y[idx[i]]
            if v < ymin:
                ymin = v
            if v > ymax:
                ymax = v
        if ymax - ymin <= 0.0:
            continue

        # candidate features: ascending order within a seeded random subset
        for j in range(p):
            feats[j] = j
        if mtry < p:
            for i in range(mtry):
                j = i + np.random.randint(0, p - i)
                t = feats[i]
                feats[i] = feats[j]
                feats[j] = t
            cand = np.sort(feats[:mtry])
        else:
            cand = feats[:p]

        best_score = -np.inf
        best_feat = -1
        best_thr = 0.0
        xs = np.empty(m, dtype=np.float64)
        ys = np.empty(m, dtype=np.float64)
        for cf in range(len(cand)):
            j = cand[cf]
            for i in range(m):
                xs[i] = X[idx[start + i], j]
                ys[i] = y[idx[start + i]]
            if random_split:
                lo = xs[0]
                hi = xs[0]
                for i in range(1, m):
                    if xs[i] < lo:
                        lo = xs[i]
                    if xs[i] > hi:
                        hi = xs[i]
                if hi <= lo:
                    continue
                thr = np.random.uniform(lo, hi)
                n_l = 0
                s_l = 0.0
                s_r = 0.0
                for i in range(m):
                    if xs[i] <= thr:
                        n_l += 1
                        s_l += ys[i]
                    else:
                        s_r += ys[i]
                n_r = m - n_l
                if n_l < min_samples_leaf or n_r < min_samples_leaf:
                    continue
                score = s_l * s_l / n_l + s_r * s_r / n_r
                if score > best_score:
                    best_score = score
                    best_feat = j
                    best_thr = thr
            else:
                order = np.argsort(xs)
                s_l = 0.0
                s_tot = 0.0
                for i in range(m):
                    s_tot += ys[i]
                for i in range(m - 1):
                    s_l += ys[order[i]]
                    n_l = i + 1
                    if xs[order[i]] == xs[order[i + 1]]:
                        continue
                    n_r = m - n_l
                    if n_l < min_samples_leaf or n_r < min_samples_leaf:
                        continue
                    s_r = s_tot - s_l
                    score = s_l * s_l / n_l + s_r * s_r / n_r
                    if score > best_score:
                        best_score = score
                        best_feat = j
                        best_thr = xs[order[i]] + 0.5 * (xs[order[i + 1]] - xs[order[i]])

        if best_feat < 0:
            continue

        # stable partition of idx[start:end] by x <= threshold
        n_l = 0
        for i in range(start, end):
            if X[idx[i], best_feat] <= best_thr:
                buf[n_l] = idx[i]
                n_l += 1
        n_r = 0
        for i in range(start, end):
            if not (X[idx[i], best_feat] <= best_thr):
                buf[n_l + n_r] = idx[i]
                n_r += 1
        for i in range(m):
            idx[start + i] = buf[i]

        lchild = n_nodes
        rchild = n_nodes + 1
        n_nodes += 2
        feature[node] = best_feat
        threshold[node] = best_thr
        left[node] = lchild
        right[node] = rchild
        stack[top] = (rchild, start + n_l, end, depth + 1)
        top += 1
        stack[top] = (lchild, start, start + n_l, depth + 1)
        top += 1

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
        count[:n_nodes].copy(),
    )


@dataclass(frozen=True)
class TreeArrays:
    """Flat representation of one fitted tree; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    count: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            cur_feat = self.feature[node]
            active = np.flatnonzero(cur_feat >= 0)
            if active.size == 0:
                break
            nd = node[active]
            go_left = X[active, self.feature[nd]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
        return self.value[node]

    def to_payload(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "count": self.count.tolist(),
        }

    @classmethod
    def from_payload(cls, d: dict) -> "TreeArrays":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=np.float64),
            count=np.asarray(d["count"], dtype=np.int64),
        )


_MAX_FEATURES_MODES = ("all", "sqrt", "log2")


def resolve_max_features(mode: str | None, p: int) -> int:
    if mode in (None, "all"):
        return p
    if mode == "sqrt":
        return max(1, int(math.sqrt(p)))
    if mode == "log2":
        return max(1, int(math.log2(p))) if p > 1 else 1
    raise ArgumentError(f"unknown max_features mode {mode!r}")


def clamp_min_samples_split(value: int) -> int:
    if value < 2:
        warnings.warn("min_samples_split < 2 is degenerate; clamped to 2")
        return 2
    return value


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_samples_split: int,
    min_samples_leaf: int,
    max_features_mode: str | None,
    random_split: bool,
    seed: int,
) -> TreeArrays:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    mtry = resolve_max_features(max_features_mode, X.shape[1])
    arrays = _build(
        X,
        y,
        max_depth,
        clamp_min_samples_split(int(min_samples_split)),
        int(min_samples_leaf),
        mtry,
        random_split,
        int(seed) % (2**32),
    )
    return TreeArrays(*arrays)


DT_DEFAULTS = {
    "max_depth": 1 << 30,
    "min_samples_split": 2,
    "min_samples_leaf": 1,
    "max_features": "all",
}


class DecisionTreeModel(FittedModel):
    algorithm = "DT"

    def __init__(self, spec: ModelSpec, tree: TreeArrays, n_features: int):
        super().__init__(spec, n_features)
        self.tree = tree

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return self.tree.predict(X)

    def payload(self) -> dict:
        return {"tree": self.tree.to_payload()}

    @classmethod
    def from_payload(cls, spec: ModelSpec, n_features: int, payload: dict):
        return cls(spec, TreeArrays.from_payload(payload["tree"]), n_features)


@register("DT", DT_DEFAULTS, DecisionTreeModel)
def fit_decision_tree(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> DecisionTreeModel:
    """Greedy CART regression tree minimizing child-mean squared error."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ArgumentError("X must be a non-empty 2-D matrix")
    hp = spec.resolved()
    n = X.shape[0]
    if hp["min_samples_leaf"] > n:
        warnings.warn("min_samples_leaf exceeds sample count; returning a single-leaf model")
    max_depth = hp["max_depth"] if hp["max_depth"] is not None else 1 << 30
    tree = grow_tree(
        X,
        y,
        max_depth=max_depth,
        min_samples_split=hp["min_samples_split"],
        min_samples_leaf=min(hp["min_samples_leaf"], n),
        max_features_mode=hp["max_features"],
        random_split=False,
        seed=spec.seed,
    )
    return DecisionTreeModel(spec, tree, X.shape[1])

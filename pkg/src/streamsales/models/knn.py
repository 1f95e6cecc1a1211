"""K-nearest-neighbor regression with three interchangeable search backends.

All backends return exactly the same neighbors: the k smallest
(squared-distance, training-row-index) pairs in lexicographic order, so ties
are broken by lowest row index everywhere.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError
from .base import FittedModel, ModelSpec, register

KNN_DEFAULTS = {
    "k": 5,
    "weights": "uniform",       # or "distance" (inverse-distance)
    "backend": "linear-scan",   # or "kd-tree", "ball-tree"
    "leaf_size": 30,
}

_BACKENDS = ("linear-scan", "kd-tree", "ball-tree")


def _sqdist(rows: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Squared distances computed identically in every backend, so backends
    agree bit-for-bit and ties resolve the same way."""
    diffs = rows - q
    return np.einsum("ij,ij->i", diffs, diffs)


def _knearest_bruteforce(train: np.ndarray, queries: np.ndarray, k: int):
    """(dist, idx) of the k nearest rows per query, lexicographic tie-break."""
    dists = np.empty((queries.shape[0], k))
    idxs = np.empty((queries.shape[0], k), dtype=np.int64)
    for i, q in enumerate(queries):
        d2 = _sqdist(train, q)
        # stable argsort over d2 keeps index order on ties
        order = np.argsort(d2, kind="stable")[:k]
        idxs[i] = order
        dists[i] = np.sqrt(d2[order])
    return dists, idxs


class _Neighborhood:
    """Bounded worst-out candidate set ordered by (squared distance, index)."""

    def __init__(self, k: int):
        self.k = k
        self._heap: list[tuple[float, int]] = []  # max-heap via negated key

    def bound(self) -> float:
        return -self._heap[0][0] if len(self._heap) == self.k else np.inf

    def offer(self, d2: float, idx: int) -> None:
        if len(self._heap) < self.k:
            heapq.heappush(self._heap, (-d2, -idx))
        else:
            worst_d2, worst_idx = -self._heap[0][0], -self._heap[0][1]
            if (d2, idx) < (worst_d2, worst_idx):
                heapq.heapreplace(self._heap, (-d2, -idx))

    def sorted_result(self) -> list[tuple[float, int]]:
        return sorted((-nd2, -nidx) for nd2, nidx in self._heap)


@dataclass
class _KdNode:
    indices: np.ndarray | None  # leaf payload
    axis: int = -1
    split: float = 0.0
    left: "._KdNode | None" = None
    right: "._KdNode | None" = None
    lo: np.ndarray | None = None  # bounding box, for pruning
    hi: np.ndarray | None = None


def _build_kdtree(train: np.ndarray, indices: np.ndarray, leaf_size: int, depth: int) -> _KdNode:
    pts = train[indices]
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    if len(indices) <= leaf_size:
        return _KdNode(indices=np.sort(indices), lo=lo, hi=hi)
    axis = int(np.argmax(hi - lo))
    if hi[axis] == lo[axis]:
        return _KdNode(indices=np.sort(indices), lo=lo, hi=hi)
    vals = train[indices, axis]
    split = float(np.median(vals))
    mask = vals <= split
    if mask.all() or not mask.any():
        mask = vals < split
        if mask.all() or not mask.any():
            return _KdNode(indices=np.sort(indices), lo=lo, hi=hi)
    return _KdNode(
        indices=None,
        axis=axis,
        split=split,
        left=_build_kdtree(train, indices[mask], leaf_size, depth + 1),
        right=_build_kdtree(train, indices[~mask], leaf_size, depth + 1),
        lo=lo,
        hi=hi,
    )


def _box_min_d2(q: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    d = np.maximum(lo - q, 0.0) + np.maximum(q - hi, 0.0)
    return float(np.dot(d, d))


def _query_kdtree(node: _KdNode, train: np.ndarray, q: np.ndarray, best: _Neighborhood):
    if _box_min_d2(q, node.lo, node.hi) > best.bound():
        return
    if node.indices is not None:
        d2s = _sqdist(train[node.indices], q)
        for d2, idx in zip(d2s, node.indices):
            best.offer(float(d2), int(idx))
        return
    first, second = node.left, node.right
    if q[node.axis] > node.split:
        first, second = second, first
    _query_kdtree(first, train, q, best)
    _query_kdtree(second, train, q, best)


@dataclass
class _BallNode:
    center: np.ndarray
    radius: float
    indices: np.ndarray | None = None
    left: "._BallNode | None" = None
    right: "._BallNode | None" = None


def _build_balltree(train: np.ndarray, indices: np.ndarray, leaf_size: int) -> _BallNode:
    pts = train[indices]
    center = pts.mean(axis=0)
    radius = float(np.sqrt(np.max(np.sum((pts - center) ** 2, axis=1))))
    if len(indices) <= leaf_size:
        return _BallNode(center=center, radius=radius, indices=np.sort(indices))
    spread = pts.max(axis=0) - pts.min(axis=0)
    axis = int(np.argmax(spread))
    if spread[axis] == 0:
        return _BallNode(center=center, radius=radius, indices=np.sort(indices))
    vals = train[indices, axis]
    split = float(np.median(vals))
    mask = vals <= split
    if mask.all() or not mask.any():
        mask = vals < split
        if mask.all() or not mask.any():
            return _BallNode(center=center, radius=radius, indices=np.sort(indices))
    return _BallNode(
        center=center,
        radius=radius,
        left=_build_balltree(train, indices[mask], leaf_size),
        right=_build_balltree(train, indices[~mask], leaf_size),
    )


def _query_balltree(node: _BallNode, train: np.ndarray, q: np.ndarray, best: _Neighborhood):
    gap = np.linalg.norm(q - node.center) - node.radius
    min_d2 = max(gap, 0.0) ** 2
    if min_d2 > best.bound():
        return
    if node.indices is not None:
        d2s = _sqdist(train[node.indices], q)
        for d2, idx in zip(d2s, node.indices):
            best.offer(float(d2), int(idx))
        return
    children = [node.left, node.right]
    children.sort(key=lambda c: np.linalg.norm(q - c.center))
    for child in children:
        _query_balltree(child, train, q, best)


class KnnModel(FittedModel):
    algorithm = "KNN"

    def __init__(self, spec: ModelSpec, train_X: np.ndarray, train_y: np.ndarray):
        super().__init__(spec, train_X.shape[1])
        hp = spec.resolved()
        self.k = int(hp["k"])
        self.weights = hp["weights"]
        self.backend = hp["backend"]
        self.leaf_size = int(hp["leaf_size"])
        if self.weights not in ("uniform", "distance"):
            raise ArgumentError(f"unknown weight mode {self.weights!r}")
        if self.backend not in _BACKENDS:
            raise ArgumentError(f"unknown backend {self.backend!r}")
        if not 1 <= self.k <= train_X.shape[0]:
            raise ArgumentError(
                f"need 1 <= k <= n, got k={self.k}, n={train_X.shape[0]}"
            )
        self.train_X = np.ascontiguousarray(train_X, dtype=float)
        self.train_y = np.ascontiguousarray(train_y, dtype=float)
        self._index = None
        if self.backend == "kd-tree":
            self._index = _build_kdtree(
                self.train_X, np.arange(len(train_X)), self.leaf_size, 0
            )
        elif self.backend == "ball-tree":
            self._index = _build_balltree(
                self.train_X, np.arange(len(train_X)), self.leaf_size
            )

    def neighbors(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(distances, indices) of the k nearest training rows per query."""
        X = np.asarray(X, dtype=float)
        if self.backend == "linear-scan":
            return _knearest_bruteforce(self.train_X, X, self.k)
        dists = np.empty((X.shape[0], self.k))
        idxs = np.empty((X.shape[0], self.k), dtype=np.int64)
        for i, q in enumerate(X):
            best = _Neighborhood(self.k)
            if self.backend == "kd-tree":
                _query_kdtree(self._index, self.train_X, q, best)
            else:
                _query_balltree(self._index, self.train_X, q, best)
            for j, (d2, idx) in enumerate(best.sorted_result()):
                dists[i, j] = np.sqrt(d2)
                idxs[i, j] = idx
        return dists, idxs

    def _predict(self, X: np.ndarray) -> np.ndarray:
        dists, idxs = self.neighbors(X)
        targets = self.train_y[idxs]
        if self.weights == "uniform":
            return targets.mean(axis=1)
        out = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            d = dists[i]
            if d[0] == 0.0:
                # exact match dominates inverse-distance weighting
                exact = idxs[i][d == 0.0]
                out[i] = self.train_y[exact].mean()
            else:
                w = 1.0 / d
                out[i] = np.dot(w, targets[i]) / w.sum()
        return out

    def payload(self) -> dict:
        return {
            "train_X": self.train_X.tolist(),
            "train_y": self.train_y.tolist(),
        }

    @classmethod
    def from_payload(cls, spec: ModelSpec, n_features: int, payload: dict):
        return cls(spec, np.asarray(payload["train_X"]), np.asarray(payload["train_y"]))


@register("KNN", KNN_DEFAULTS, KnnModel)
def fit_knn(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> KnnModel:
    """Store the training set; prediction averages the k nearest targets."""
    return KnnModel(spec, X, y)

"""Cross-validation, exhaustive grid search, and the eight-model benchmark."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset, FoldPlan, make_folds
from .errors import ArgumentError, PlanError, SearchError
from .metrics import Metrics, compute_metrics, mean_metrics
from .models import ALGORITHMS, ModelSpec, fit

# Allowed hyperparameter ranges, used to validate grid files.
# Numeric entries are (low, high) inclusive; sets enumerate categorical values.
HYPERPARAMETER_RANGES: dict[str, dict] = {
    "DT": {
        "max_depth": (5, 100),
        "min_samples_split": (1, 10),
        "min_samples_leaf": (1, 4),
        "max_features": {"sqrt", "log2"},
    },
    "RF": {
        "n_estimators": (10, 500),
        "max_depth": (5, 100),
        "min_samples_split": (1, 10),
        "min_samples_leaf": (1, 4),
        "max_features": {"sqrt", "log2"},
        "bootstrap": {True, False},
    },
    "SVR": {
        "kernel": {"linear", "polynomial", "rbf", "sigmoid"},
        "C": (0.1, 1000.0),
        "epsilon": (0.01, 100.0),
    },
    "ET": {
        "n_estimators": (10, 800),
        "max_depth": (5, 100),
        "min_samples_split": (2, 10),
        "min_samples_leaf": (1, 4),
        "max_features": {"sqrt", "log2"},
        "bootstrap": {True, False},
    },
    "LR": {
        "keep_intercept": {True, False},
        "normalize": {True, False},
        "max_iterations": (100, 5000),
    },
    "KNN": {
        "k": (2, 50),
        "weights": {"uniform", "distance"},
        "backend": {"linear-scan", "kd-tree", "ball-tree"},
        "leaf_size": (10, 50),
    },
    "AdaBoost": {
        "n_estimators": (10, 800),
        "learning_rate": (0.01, 100.0),
        "loss": {"linear", "square", "exponential"},
    },
    "GBRT": {
        "n_estimators": (10, 800),
        "max_depth": (5, 100),
        "learning_rate": (0.01, 0.5),
    },
}

SELECTION_METRICS = ("mape", "mae", "mse")


@dataclass(frozen=True)
class GridSpec:
    """Explicit value lists per hyperparameter for one algorithm."""

    algorithm: str
    values: dict[str, list]

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ArgumentError(f"unknown algorithm {self.algorithm!r}")
        ranges = HYPERPARAMETER_RANGES[self.algorithm]
        for name, vals in self.values.items():
            if name not in ranges:
                raise ArgumentError(
                    f"{self.algorithm}: hyperparameter {name!r} is not tunable; "
                    f"allowed: {sorted(ranges)}"
                )
            if not vals:
                raise ArgumentError(f"{self.algorithm}.{name}: empty value list")
            bound = ranges[name]
            for v in vals:
                if isinstance(bound, set):
                    if v not in bound:
                        raise ArgumentError(
                            f"{self.algorithm}.{name}: {v!r} not in {sorted(map(str, bound))}"
                        )
                else:
                    lo, hi = bound
                    if not (lo <= v <= hi):
                        raise ArgumentError(
                            f"{self.algorithm}.{name}: {v} outside [{lo}, {hi}]"
                        )

    def configs(self, seed: int) -> list[ModelSpec]:
        """Cartesian product in canonical order (sorted names, listed values)."""
        names = sorted(self.values)
        combos = itertools.product(*(self.values[n] for n in names))
        return [
            ModelSpec(self.algorithm, dict(zip(names, combo)), seed=seed)
            for combo in combos
        ]


@dataclass(frozen=True)
class CvResult:
    per_fold: tuple[Metrics, ...]
    mean: Metrics
    oof_predictions: np.ndarray  # out-of-fold prediction for every row


def cross_validate(spec: ModelSpec, ds: Dataset, plan: FoldPlan) -> CvResult:
    """Fit on each fold's complement, score the held-out fold.

    Metrics live on the dataset's (transformed, log-GMV) target scale.
    """
    if plan.n != ds.n:
        raise PlanError(f"fold plan covers {plan.n} rows, dataset has {ds.n}")
    per_fold = []
    oof = np.full(ds.n, np.nan)
    for f in range(plan.k):
        train_idx, test_idx = plan.train_test(f)
        if len(test_idx) == 0:
            raise PlanError(f"fold {f} is empty")
        model = fit(spec, ds.features[train_idx], ds.target[train_idx])
        yhat = model.predict(ds.features[test_idx])
        oof[test_idx] = yhat
        per_fold.append(compute_metrics(ds.target[test_idx], yhat))
    return CvResult(
        per_fold=tuple(per_fold), mean=mean_metrics(per_fold), oof_predictions=oof
    )


@dataclass(frozen=True)
class GridEntry:
    config: ModelSpec
    per_fold: tuple[Metrics, ...] | None
    mean: Metrics | None
    error: str | None = None


@dataclass(frozen=True)
class SearchResult:
    algorithm: str
    entries: tuple[GridEntry, ...]
    best_index: int
    selection_metric: str

    @property
    def best_config(self) -> ModelSpec:
        return self.entries[self.best_index].config

    @property
    def best_mean(self) -> Metrics:
        return self.entries[self.best_index].mean


def grid_search(
    grid: GridSpec, ds: Dataset, plan: FoldPlan, metric: str = "mape", seed: int = 0
) -> SearchResult:
    """Evaluate the full Cartesian product; failures are recorded, not fatal."""
    if metric not in SELECTION_METRICS:
        raise ArgumentError(f"unknown selection metric {metric!r}")
    configs = grid.configs(seed)
    if not configs:
        raise SearchError(f"{grid.algorithm}: empty grid")
    entries: list[GridEntry] = []
    for config in configs:
        try:
            cv = cross_validate(config, ds, plan)
            entries.append(GridEntry(config, cv.per_fold, cv.mean))
        except Exception as exc:  # recorded; exhaustive search keeps going
            entries.append(GridEntry(config, None, None, error=f"{type(exc).__name__}: {exc}"))
    scored = [(i, e.mean.get(metric)) for i, e in enumerate(entries) if e.mean is not None]
    if not scored:
        raise SearchError(
            f"{grid.algorithm}: every configuration failed; "
            f"first error: {entries[0].error}"
        )
    best_index = min(scored, key=lambda t: t[1])[0]  # ties: earliest enumeration
    return SearchResult(
        algorithm=grid.algorithm,
        entries=tuple(entries),
        best_index=best_index,
        selection_metric=metric,
    )


@dataclass(frozen=True)
class BenchmarkReport:
    results: dict[str, SearchResult | None]
    failures: dict[str, str]
    best_algorithm: str
    seed: int
    folds: int
    selection_metric: str

    def table(self) -> dict[str, Metrics]:
        return {
            alg: res.best_mean
            for alg, res in self.results.items()
            if res is not None
        }


def benchmark_all(
    ds: Dataset,
    grids: dict[str, GridSpec],
    seed: int,
    folds: int = 10,
    metric: str = "mape",
    algorithms: tuple[str, ...] = ALGORITHMS,
) -> BenchmarkReport:
    """Grid-search every algorithm on one shared fold plan."""
    missing = [a for a in algorithms if a not in grids]
    if missing:
        raise ArgumentError(f"no grid provided for: {missing}")
    plan = make_folds(ds.n, folds, seed)
    results: dict[str, SearchResult | None] = {}
    failures: dict[str, str] = {}
    for alg in algorithms:
        try:
            results[alg] = grid_search(grids[alg], ds, plan, metric=metric, seed=seed)
        except SearchError as exc:
            results[alg] = None
            failures[alg] = str(exc)
    ok = [(alg, res.best_mean) for alg, res in results.items() if res is not None]
    if not ok:
        raise SearchError("every algorithm failed to produce a result")
    best_algorithm = min(ok, key=lambda t: (t[1].mape, t[1].mae, t[1].mse))[0]
    return BenchmarkReport(
        results=results,
        failures=failures,
        best_algorithm=best_algorithm,
        seed=seed,
        folds=folds,
        selection_metric=metric,
    )


# Default grid discretizations. Kept deliberately small so the full
# eight-model benchmark finishes in minutes; override via a grid file
# for denser searches.
_DEFAULT_GRIDS = {
    "DT": {
        "max_depth": [10, 30, 100],
        "max_features": ["sqrt", "log2"],
    },
    "RF": {
        "n_estimators": [50, 200],
        "max_depth": [30],
        "max_features": ["sqrt"],
        "bootstrap": [True, False],
    },
    "SVR": {
        "kernel": ["rbf", "linear"],
        "C": [1.0, 100.0],
        "epsilon": [0.1],
    },
    "ET": {
        "n_estimators": [50, 200],
        "max_depth": [30],
        "max_features": ["sqrt", "log2"],
    },
    "LR": {
        "keep_intercept": [True, False],
        "normalize": [True, False],
    },
    "KNN": {
        "k": [5, 15, 35],
        "weights": ["uniform", "distance"],
        "backend": ["kd-tree"],
    },
    "AdaBoost": {
        "n_estimators": [50, 200],
        "learning_rate": [0.1, 1.0],
        "loss": ["linear"],
    },
    "GBRT": {
        "n_estimators": [100, 300],
        "max_depth": [5],
        "learning_rate": [0.1],
    },
}


def default_grids() -> dict[str, GridSpec]:
    return {alg: GridSpec(alg, dict(vals)) for alg, vals in _DEFAULT_GRIDS.items()}


def load_grids(path: str | Path) -> dict[str, GridSpec]:
    raw = json.loads(Path(path).read_text())
    return {alg: GridSpec(alg, dict(vals)) for alg, vals in raw.items()}


def save_grids(grids: dict[str, GridSpec], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps({alg: g.values for alg, g in grids.items()}, indent=2) + "\n"
    )


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

def benchmark_csv(report: BenchmarkReport, algorithms: tuple[str, ...] = ALGORITHMS) -> str:
    """Metric rows x algorithm columns, mirroring the benchmark table layout."""
    present = [a for a in algorithms if report.results.get(a) is not None]
    lines = ["metric," + ",".join(present)]
    table = report.table()
    for metric in ("mae", "mse", "mape"):
        cells = [repr(table[a].get(metric)) for a in present]
        lines.append(metric + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def benchmark_detail(report: BenchmarkReport) -> dict:
    out = {
        "seed": report.seed,
        "folds": report.folds,
        "selection_metric": report.selection_metric,
        "best_algorithm": report.best_algorithm,
        "failures": dict(report.failures),
        "algorithms": {},
    }
    for alg, res in report.results.items():
        if res is None:
            out["algorithms"][alg] = None
            continue
        out["algorithms"][alg] = {
            "best_index": res.best_index,
            "best_config": res.best_config.to_dict(),
            "entries": [
                {
                    "config": e.config.to_dict(),
                    "mean": None if e.mean is None else {
                        "mae": e.mean.mae, "mse": e.mean.mse, "mape": e.mean.mape
                    },
                    "per_fold": None if e.per_fold is None else [
                        {"mae": m.mae, "mse": m.mse, "mape": m.mape} for m in e.per_fold
                    ],
                    "error": e.error,
                }
                for e in res.entries
            ],
        }
    return out

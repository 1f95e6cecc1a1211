import numpy as np
import pytest

from streamsales.data import make_folds
from streamsales.errors import ArgumentError, PlanError, SearchError
from streamsales.models import ALGORITHMS, ModelSpec
from streamsales.tuning import (
    GridSpec,
    benchmark_all,
    benchmark_csv,
    benchmark_detail,
    cross_validate,
    default_grids,
    grid_search,
    load_grids,
    save_grids,
)


@pytest.fixture(scope="module")
def plan(log_ds):
    return make_folds(log_ds.n, 5, seed=21)


def test_cross_validate_covers_every_row(log_ds, plan):
    cv = cross_validate(ModelSpec("LR", {}, seed=0), log_ds, plan)
    assert len(cv.per_fold) == 5
    assert cv.oof_predictions.shape == (log_ds.n,)
    assert np.isfinite(cv.oof_predictions).all()


def test_cross_validate_mean_is_fold_average(log_ds, plan):
    cv = cross_validate(ModelSpec("LR", {}, seed=0), log_ds, plan)
    assert cv.mean.mape == pytest.approx(
        np.mean([m.mape for m in cv.per_fold])
    )


def test_cross_validate_plan_size_mismatch(log_ds):
    with pytest.raises(PlanError):
        cross_validate(ModelSpec("LR", {}, seed=0), log_ds,
                       make_folds(log_ds.n + 1, 5, seed=0))


def test_grid_configs_canonical_order():
    grid = GridSpec("DT", {"max_features": ["sqrt", "log2"],
                           "max_depth": [5, 30]})
    combos = [c.hyperparameters for c in grid.configs(0)]
    assert combos == [
        {"max_depth": 5, "max_features": "sqrt"},
        {"max_depth": 5, "max_features": "log2"},
        {"max_depth": 30, "max_features": "sqrt"},
        {"max_depth": 30, "max_features": "log2"},
    ]


def test_grid_rejects_out_of_range_values():
    with pytest.raises(ArgumentError):
        GridSpec("DT", {"max_depth": [200]})
    with pytest.raises(ArgumentError):
        GridSpec("SVR", {"C": [0.001]})
    with pytest.raises(ArgumentError):
        GridSpec("KNN", {"weights": ["nearest"]})
    with pytest.raises(ArgumentError):
        GridSpec("LR", {"solver": ["qr"]})
    with pytest.raises(ArgumentError):
        GridSpec("DT", {"max_depth": []})


def test_grid_search_picks_minimum(log_ds, plan):
    grid = GridSpec("KNN", {"k": [2, 10, 40]})
    result = grid_search(grid, log_ds, plan, metric="mae", seed=0)
    means = [e.mean.mae for e in result.entries]
    assert result.best_index == int(np.argmin(means))
    assert result.best_mean.mae == min(means)


def test_grid_search_records_failures(log_ds, plan):
    # k larger than any training fold fails inside fit, not fatally
    grid = GridSpec("KNN", {"k": [5, 50]})
    small = log_ds.subset(np.arange(40))
    small_plan = make_folds(40, 5, seed=0)
    result = grid_search(grid, small, small_plan, seed=0)
    assert result.entries[0].error is None
    assert result.entries[1].error is not None
    assert result.best_index == 0


def test_grid_search_all_failed_raises(log_ds):
    small = log_ds.subset(np.arange(20))
    small_plan = make_folds(20, 4, seed=0)
    grid = GridSpec("KNN", {"k": [30, 40]})
    with pytest.raises(SearchError, match="every configuration failed"):
        grid_search(grid, small, small_plan, seed=0)


def test_default_grids_cover_all_algorithms():
    grids = default_grids()
    assert set(grids) == set(ALGORITHMS)
    # stay small enough for the ten-minute benchmark budget
    for alg, grid in grids.items():
        assert len(grid.configs(0)) <= 8, alg


def test_grids_file_roundtrip(tmp_path):
    grids = default_grids()
    path = tmp_path / "grids.json"
    save_grids(grids, path)
    again = load_grids(path)
    assert set(again) == set(grids)
    for alg in grids:
        assert again[alg].values == grids[alg].values


def test_benchmark_all_two_algorithms(log_ds):
    grids = {"LR": GridSpec("LR", {"keep_intercept": [True, False]}),
             "KNN": GridSpec("KNN", {"k": [5, 15]})}
    report = benchmark_all(log_ds, grids, seed=1, folds=4,
                           algorithms=("LR", "KNN"))
    assert set(report.table()) == {"LR", "KNN"}
    assert report.best_algorithm in ("LR", "KNN")
    csv = benchmark_csv(report, algorithms=("LR", "KNN"))
    lines = csv.strip().splitlines()
    assert lines[0] == "metric,LR,KNN"
    assert len(lines) == 4
    detail = benchmark_detail(report)
    assert detail["best_algorithm"] == report.best_algorithm
    assert len(detail["algorithms"]["LR"]["entries"]) == 2


def test_benchmark_missing_grid_rejected(log_ds):
    with pytest.raises(ArgumentError, match="no grid"):
        benchmark_all(log_ds, {}, seed=0, folds=4, algorithms=("LR",))


def test_benchmark_deterministic(log_ds):
    grids = {"LR": GridSpec("LR", {"normalize": [True, False]})}
    a = benchmark_all(log_ds, grids, seed=3, folds=4, algorithms=("LR",))
    b = benchmark_all(log_ds, grids, seed=3, folds=4, algorithms=("LR",))
    assert benchmark_csv(a, ("LR",)) == benchmark_csv(b, ("LR",))

"""End-to-end acceptance gate: one test per release criterion.

Each test emits a single pass/fail line under ``pytest -v`` and checks a
stated tolerance, so this file doubles as the release checklist.
"""

import json
import time

import numpy as np
import pytest
from click.testing import CliRunner

from streamsales.cli import main as cli_main
from streamsales.data import Dataset, make_folds, transform
from streamsales.explain import (
    Shap3DSurface,
    ale_curve,
    background_sample,
    detect_thresholds,
    shapley_exact,
    shapley_sampled,
)
from streamsales.metrics import compute_metrics
from streamsales.models import ModelSpec, fit
from streamsales.schema import default_schema
from streamsales.synth import default_synthetic_spec, synthesize
from streamsales.tuning import benchmark_all, default_grids


def _surface(x_grid, z_grid):
    n = len(x_grid)
    return Shap3DSurface(
        feature_index=0, feature_name="f",
        x=np.asarray(x_grid, float), y=np.zeros(n),
        z_raw=np.asarray(z_grid, float), z_smooth=np.asarray(z_grid, float),
        k_neighbors=1, x_grid=np.asarray(x_grid, float),
        z_grid=np.asarray(z_grid, float),
        row_ids=tuple(str(i) for i in range(n)),
    )


def test_criterion_1_benchmark_ranks_forest_above_linear_within_budget():
    """n=2000 planted data: RF beats LR on MAPE, lands top-2, in <10 min."""
    spec = default_synthetic_spec()
    ds = transform(synthesize(spec, 2000, seed=123))
    start = time.monotonic()
    report = benchmark_all(ds, default_grids(), seed=123, folds=10,
                           metric="mape")
    elapsed = time.monotonic() - start
    table = report.table()
    assert len(table) == 8
    assert table["RF"].mape < table["LR"].mape
    order = sorted(table, key=lambda a: table[a].mape)
    assert order.index("RF") < 2
    assert elapsed < 600.0


def test_criterion_2_shapley_axioms_hold_exactly():
    """Efficiency <1e-6, dummy <1e-9, duplicate symmetry <1e-9 (50 samples)."""
    rng = np.random.default_rng(17)
    p = 6
    X = rng.normal(size=(200, p))
    y = X[:, 0] * X[:, 1] + np.sin(X[:, 2]) + 0.1 * rng.normal(size=200)
    tree = fit(ModelSpec("RF", {"n_estimators": 15}, seed=2), X, y)
    bg = background_sample(X, limit=30, seed=0)

    class Additive:
        # feature 3 is a dummy; features 4 and 5 enter identically
        def predict(self, Z):
            Z = np.atleast_2d(np.asarray(Z, float))
            return 2.0 * Z[:, 0] - Z[:, 1] + 0.5 * Z[:, 2] + Z[:, 4] + Z[:, 5]

    bg_dup = bg.copy()
    bg_dup[:, 5] = bg_dup[:, 4]
    samples = rng.normal(size=(50, p))
    for x in samples:
        for model in (tree, Additive()):
            phi, base = shapley_exact(model, x, bg)
            fx = float(model.predict(x.reshape(1, -1))[0])
            assert abs(base + phi.sum() - fx) < 1e-6
        phi, _ = shapley_exact(Additive(), x, bg)
        assert abs(phi[3]) < 1e-9  # dummy
        x_dup = x.copy()
        x_dup[5] = x_dup[4]
        phi, _ = shapley_exact(Additive(), x_dup, bg_dup)
        assert abs(phi[4] - phi[5]) < 1e-9  # duplicates


def test_criterion_3_sampler_converges_to_exact_attributions():
    """p=8 RF: 2000-perm error <5% of exact range; error shrinks with perms."""
    rng = np.random.default_rng(31)
    p = 8
    X = rng.normal(size=(300, p))
    y = X[:, 0] + X[:, 1] * X[:, 2] + 0.1 * rng.normal(size=300)
    model = fit(ModelSpec("RF", {"n_estimators": 20}, seed=5), X, y)
    bg = background_sample(X, limit=40, seed=0)
    x = X[0]
    phi_exact, _ = shapley_exact(model, x, bg)
    span = phi_exact.max() - phi_exact.min()

    budgets = (100, 500, 2000)
    mean_err = []
    for n_perm in budgets:
        errs = []
        for seed in range(10):
            phi_s, _, _ = shapley_sampled(model, x, bg, n_perm, seed=seed)
            errs.append(np.abs(phi_s - phi_exact).max())
        mean_err.append(np.mean(errs))
        if n_perm == 2000:
            assert max(errs) < 0.05 * span
    assert mean_err[0] > mean_err[1] > mean_err[2]


def test_criterion_4_ale_recovers_planted_linear_slope():
    """f = 2 x_j + h(others), n=5000, K=20: slope within 5%, mean < 1e-9."""
    schema = default_schema()
    rng = np.random.default_rng(44)
    n, j = 5000, 3
    X = rng.uniform(0.0, 1.0, size=(n, len(schema.predictor_names)))
    ds = Dataset(schema=schema, features=X, target=np.zeros(n),
                 row_ids=tuple(f"r{i}" for i in range(n)), transformed=True)

    class Planted:
        def predict(self, Z):
            Z = np.atleast_2d(np.asarray(Z, float))
            return 2.0 * Z[:, j] + np.sin(3.0 * Z[:, 0]) - Z[:, 1] ** 2

    curve = ale_curve(Planted(), ds, j=j, k=20)
    A = np.column_stack([np.ones(curve.k), curve.edges[1:]])
    slope = np.linalg.lstsq(A, curve.accumulated[1:], rcond=None)[0][1]
    assert abs(slope - 2.0) < 0.05 * 2.0
    weighted_mean = float(np.dot(curve.counts, curve.accumulated[1:])) / n
    assert abs(weighted_mean) < 1e-9


def test_criterion_5_metrics_match_hand_computed_values():
    m = compute_metrics(np.array([1.0, 2.0]), np.array([2.0, 4.0]))
    assert (m.mae, m.mse, m.mape) == (1.5, 2.5, 100.0)
    y = np.array([3.0, -1.5, 7.0])
    perfect = compute_metrics(y, y.copy())
    assert (perfect.mae, perfect.mse, perfect.mape) == (0.0, 0.0, 0.0)


def test_criterion_6_reduced_ensembles_match_their_base_learners():
    rng = np.random.default_rng(60)
    X = rng.normal(size=(200, 4))
    y = X[:, 0] - 2.0 * X[:, 2] + 0.2 * rng.normal(size=200)
    Xq = rng.normal(size=(1000, 4))

    forest = fit(ModelSpec("RF", {"n_estimators": 1, "bootstrap": False,
                                  "max_features": "all"}, seed=9), X, y)
    tree = fit(ModelSpec("DT", {}, seed=9), X, y)
    np.testing.assert_array_equal(forest.predict(Xq), tree.predict(Xq))

    gbrt = fit(ModelSpec("GBRT", {"n_estimators": 1, "learning_rate": 1.0},
                         seed=0), X, y)
    base = float(y.mean())
    residual_tree = fit(ModelSpec("DT", {"max_depth": 3}, seed=0), X, y - base)
    np.testing.assert_allclose(gbrt.predict(Xq),
                               base + residual_tree.predict(Xq), atol=1e-12)

    ada = fit(ModelSpec("AdaBoost", {"n_estimators": 1}, seed=3), X, y)
    np.testing.assert_array_equal(ada.predict(Xq), ada.stages[0].predict(Xq))

    preds = [
        fit(ModelSpec("KNN", {"k": 7, "backend": backend}, seed=0),
            X, y).predict(Xq)
        for backend in ("linear-scan", "kd-tree", "ball-tree")
    ]
    np.testing.assert_array_equal(preds[0], preds[1])
    np.testing.assert_array_equal(preds[0], preds[2])


def test_criterion_7_folds_partition_indices_evenly():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 500))
        k = int(rng.integers(2, min(n, 20) + 1))
        plan = make_folds(n, k, seed=int(rng.integers(1 << 31)))
        all_idx = np.concatenate(plan.folds)
        np.testing.assert_array_equal(np.sort(all_idx), np.arange(n))
        sizes = [len(f) for f in plan.folds]
        assert max(sizes) - min(sizes) <= 1


def test_criterion_8_threshold_detector_locates_planted_breaks():
    xg = np.linspace(0.0, 14.0, 100)
    cell = xg[1] - xg[0]
    z = np.where(xg < 4.2, 0.1 * xg,
                 np.where(xg < 9.5,
                          0.42 + 1.3 * (xg - 4.2),
                          0.42 + 1.3 * 5.3 + 0.05 * (xg - 9.5)))
    report = detect_thresholds(_surface(xg, z))
    assert abs(report.breakpoints[0] - 4.2) <= cell
    assert abs(report.breakpoints[1] - 9.5) <= cell

    hump = detect_thresholds(_surface(np.linspace(0, 10, 80),
                                      -(np.linspace(0, 10, 80) - 5.0) ** 2))
    assert hump.slopes[2] < 0
    assert hump.negative_final_slope


def test_criterion_9_cli_reruns_are_byte_identical(tmp_path):
    runner = CliRunner()
    data = tmp_path / "data.csv"
    r = runner.invoke(cli_main, ["generate", "-n", "100", "--seed", "5",
                                 "--out", str(data)])
    assert r.exit_code == 0, r.output

    pairs = {}
    for tag in ("a", "b"):
        bench = tmp_path / f"bench_{tag}"
        r = runner.invoke(cli_main, ["benchmark", "--data", str(data),
                                     "--folds", "5", "--seed", "1",
                                     "--out", str(bench)])
        assert r.exit_code == 0, r.output
        expl = tmp_path / f"expl_{tag}"
        r = runner.invoke(cli_main, ["explain", "--data", str(data),
                                     "--algorithm", "DT", "--seed", "1",
                                     "--permutations", "20",
                                     "--ale", "Comments", "--shap3d", "Likes",
                                     "--out", str(expl)])
        assert r.exit_code == 0, r.output
        pairs[tag] = (bench, expl)

    for (a_dir, b_dir) in zip(pairs["a"], pairs["b"]):
        names = sorted(p.name for p in a_dir.iterdir())
        assert names == sorted(p.name for p in b_dir.iterdir())
        for name in names:
            a_bytes = (a_dir / name).read_bytes()
            b_bytes = (b_dir / name).read_bytes()
            if name == "manifest.json":
                # identical except for the differing output directory name
                a_bytes = a_bytes.replace(b"bench_a", b"X").replace(b"expl_a", b"X")
                b_bytes = b_bytes.replace(b"bench_b", b"X").replace(b"expl_b", b"X")
            assert a_bytes == b_bytes, name


def test_criterion_10_generator_hits_requested_moments_and_correlations():
    spec = default_synthetic_spec()
    ds = synthesize(spec, 5000, seed=7)
    for m in spec.marginals:
        achieved = float(np.mean(ds.column(m.name)))
        assert abs(achieved - m.mean) <= 0.10 * abs(m.mean), m.name
    for a, b, rho in spec.correlations:
        r = float(np.corrcoef(ds.column(a), ds.column(b))[0, 1])
        assert abs(r - rho) <= 0.05, (a, b)

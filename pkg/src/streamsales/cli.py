"""Command-line orchestration: data generation, validation, benchmarking,
tuning, training, and interpretation reports."""

from __future__ import annotations

import functools
import hashlib
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, svgplot
from .data import (
    load_csv,
    make_folds,
    split_by_gender,
    transform,
    validate,
    write_csv,
)
from .errors import ArgumentError, StreamSalesError
from .explain import (
    ale_csv,
    ale_curve,
    background_sample,
    detect_thresholds,
    global_importance,
    group_importance,
    shap3d,
    shap_matrix,
    shap_matrix_csv,
    shap_matrix_sidecar,
    summary_points,
    surface_grid_csv,
    surface_points_csv,
    threshold_sidecar,
)
from .metrics import compute_metrics
from .models import ALGORITHMS, ModelSpec, fit, load_model, save_model
from .schema import default_schema, FeatureSchema
from .synth import SyntheticSpec, default_synthetic_spec, synthesize
from .tuning import (
    GridSpec,
    benchmark_all,
    benchmark_csv,
    benchmark_detail,
    default_grids,
    grid_search,
    load_grids,
)

_CONTEXT = {"auto_envvar_prefix": "STREAMSALES", "help_option_names": ["-h", "--help"]}


def _fail(exc: BaseException, code: int) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _guard(fn):
    """Map library errors to exit 2 (user/input) and the rest to exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except StreamSalesError as exc:
            _fail(exc, 2)
        except (click.ClickException, SystemExit):
            raise
        except Exception as exc:  # internal error
            _fail(exc, 1)

    return wrapper


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, params: dict,
                    inputs: list[Path], outputs: list[Path]) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "parameters": params,
        "inputs": {str(p): _sha256(p) for p in inputs if p is not None},
        "outputs": sorted(str(p.relative_to(out_dir)) for p in outputs),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ArgumentError("config file must hold a JSON object")
    return raw


def _pick(flag, config: dict, key: str, default):
    """Flags override the config file; the config file overrides defaults."""
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _load_schema(path: str | None) -> FeatureSchema:
    return FeatureSchema.load(path) if path else default_schema()


def _load_dataset(data_path: str, schema_path: str | None, strict: bool):
    schema = _load_schema(schema_path)
    ds = load_csv(data_path, schema)
    report = validate(ds, strict=strict)
    if report.nan_rows:
        first = report.nan_rows[0]
        raise ArgumentError(
            f"{len(report.nan_rows)} non-finite cell(s); first at "
            f"variable {first[0]!r} row {first[1]}"
        )
    for v in report.violations[:5]:
        click.echo(
            f"warning: {v.variable} row {v.row} value {v.value} outside "
            f"[{v.lower_bound}, {v.upper_bound}]",
            err=True,
        )
    if len(report.violations) > 5:
        click.echo(f"warning: {len(report.violations) - 5} more bound violations", err=True)
    return ds


_config_option = click.option("--config", type=click.Path(exists=True, dir_okay=False),
                              default=None, help="JSON config file; flags override it.")


@click.group(context_settings=_CONTEXT)
@click.version_option(__version__)
def main():
    """Livestream sales toolkit: synthesize data, benchmark regressors,
    and explain the fitted models."""


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Synthetic-data spec JSON (defaults built in).")
@click.option("-n", "n_rows", type=int, default=None, help="Rows to generate.")
@click.option("--seed", type=int, default=None)
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output CSV path (default data.csv).")
@_config_option
@_guard
def generate(spec_path, n_rows, seed, schema_path, out, config):
    """Synthesize a calibrated dataset and write it as CSV."""
    cfg = _load_config(config)
    n_rows = int(_pick(n_rows, cfg, "n", 1000))
    seed = int(_pick(seed, cfg, "seed", 0))
    out = Path(_pick(out, cfg, "out", "data.csv"))
    spec_path = _pick(spec_path, cfg, "spec", None)
    schema_path = _pick(schema_path, cfg, "schema", None)
    schema = _load_schema(schema_path)
    spec = SyntheticSpec.load(spec_path) if spec_path else default_synthetic_spec(schema)
    ds = synthesize(spec, n_rows, seed, schema)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(ds, out)
    click.echo(f"wrote {ds.n} rows x {len(schema.names)} columns to {out}")
    click.echo(f"{'variable':<16}{'target mean':>14}{'achieved':>14}"
               f"{'target std':>14}{'achieved':>14}")
    for m in spec.marginals:
        col = ds.column(m.name)
        click.echo(
            f"{m.name:<16}{m.mean:>14.4g}{float(np.mean(col)):>14.4g}"
            f"{m.std:>14.4g}{float(np.std(col, ddof=1)):>14.4g}"
        )
    _write_manifest(out.parent, "generate",
                    {"n": n_rows, "seed": seed},
                    [Path(p) for p in (spec_path, schema_path) if p],
                    [out])


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

@main.command("validate")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--strict", is_flag=True, default=False,
              help="Treat bound violations as fatal.")
@_guard
def validate_cmd(data_path, schema_path, strict):
    """Check a data CSV against the schema; exit 2 on violations."""
    schema = _load_schema(schema_path)
    ds = load_csv(data_path, schema)
    report = validate(ds, strict=False)
    for name, row in report.nan_rows:
        click.echo(f"non-finite: {name} row {row}")
    for v in report.violations:
        click.echo(
            f"bound: {v.variable} row {v.row} value {v.value} outside "
            f"[{v.lower_bound}, {v.upper_bound}]"
        )
    if report.nan_rows or (strict and report.violations):
        _fail(ArgumentError(
            f"{len(report.violations)} bound violation(s), "
            f"{len(report.nan_rows)} non-finite cell(s)"), 2)
    click.echo(f"ok: {ds.n} rows, {len(report.violations)} advisory bound note(s)")


# ---------------------------------------------------------------------------
# benchmark / tune / train
# ---------------------------------------------------------------------------

@main.command()
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--grids", "grids_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Grid JSON; built-in small grids by default.")
@click.option("--seed", type=int, default=None)
@click.option("--folds", type=int, default=None)
@click.option("--metric", type=click.Choice(["mape", "mae", "mse"]), default=None)
@click.option("--algorithm", "algorithms", multiple=True,
              type=click.Choice(ALGORITHMS), help="Restrict to these algorithms.")
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--strict", is_flag=True, default=False)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@_config_option
@_guard
def benchmark(data_path, grids_path, seed, folds, metric, algorithms,
              schema_path, strict, out, config):
    """Cross-validated grid search over all (or selected) algorithms."""
    cfg = _load_config(config)
    seed = int(_pick(seed, cfg, "seed", 0))
    folds = int(_pick(folds, cfg, "folds", 10))
    metric = _pick(metric, cfg, "metric", "mape")
    out_dir = Path(_pick(out, cfg, "out", "benchmark_out"))
    grids_path = _pick(grids_path, cfg, "grids", None)
    ds = transform(_load_dataset(data_path, schema_path, strict))
    grids = load_grids(grids_path) if grids_path else default_grids()
    algs = tuple(algorithms) if algorithms else ALGORITHMS
    report = benchmark_all(ds, grids, seed=seed, folds=folds, metric=metric,
                           algorithms=algs)
    table = report.table()
    present = [a for a in algs if a in table]
    click.echo("metric " + " ".join(f"{a:>10}" for a in present))
    for m in ("mae", "mse", "mape"):
        click.echo(f"{m:<6} " + " ".join(f"{table[a].get(m):>10.4f}" for a in present))
    click.echo(f"best: {report.best_algorithm}")
    for alg, why in report.failures.items():
        click.echo(f"failed: {alg}: {why}", err=True)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "benchmark.csv"
    csv_path.write_text(benchmark_csv(report, algorithms=algs))
    detail_path = out_dir / "benchmark_detail.json"
    detail_path.write_text(json.dumps(benchmark_detail(report), indent=2,
                                      sort_keys=True) + "\n")
    _write_manifest(out_dir, "benchmark",
                    {"seed": seed, "folds": folds, "metric": metric,
                     "algorithms": list(algs)},
                    [Path(data_path)] + [Path(p) for p in (grids_path, schema_path) if p],
                    [csv_path, detail_path])


@main.command()
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--algorithm", type=click.Choice(ALGORITHMS), required=True)
@click.option("--grids", "grids_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--seed", type=int, default=None)
@click.option("--folds", type=int, default=None)
@click.option("--metric", type=click.Choice(["mape", "mae", "mse"]), default=None)
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--strict", is_flag=True, default=False)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Result JSON path (default tune_<algorithm>.json).")
@_config_option
@_guard
def tune(data_path, algorithm, grids_path, seed, folds, metric, schema_path,
         strict, out, config):
    """Grid-search one algorithm and report the best configuration."""
    cfg = _load_config(config)
    seed = int(_pick(seed, cfg, "seed", 0))
    folds = int(_pick(folds, cfg, "folds", 10))
    metric = _pick(metric, cfg, "metric", "mape")
    grids_path = _pick(grids_path, cfg, "grids", None)
    out = Path(_pick(out, cfg, "out", f"tune_{algorithm}.json"))
    ds = transform(_load_dataset(data_path, schema_path, strict))
    grids = load_grids(grids_path) if grids_path else default_grids()
    plan = make_folds(ds.n, folds, seed)
    result = grid_search(grids[algorithm], ds, plan, metric=metric, seed=seed)
    best = result.best_config
    click.echo(f"best {algorithm}: {best.hyperparameters}")
    click.echo(f"mean: mae={result.best_mean.mae:.4f} mse={result.best_mean.mse:.4f} "
               f"mape={result.best_mean.mape:.2f}%")
    payload = {
        "algorithm": algorithm,
        "seed": seed,
        "folds": folds,
        "selection_metric": metric,
        "best_config": best.to_dict(),
        "entries": [
            {
                "config": e.config.to_dict(),
                "mean": None if e.mean is None else
                    {"mae": e.mean.mae, "mse": e.mean.mse, "mape": e.mean.mape},
                "error": e.error,
            }
            for e in result.entries
        ],
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    click.echo(f"wrote {out}")


@main.command()
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--algorithm", type=click.Choice(ALGORITHMS), default=None)
@click.option("--hyperparameters", "hp_json", default=None,
              help="JSON object of hyperparameter overrides.")
@click.option("--seed", type=int, default=None)
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--strict", is_flag=True, default=False)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Model JSON path (default model.json).")
@_config_option
@_guard
def train(data_path, algorithm, hp_json, seed, schema_path, strict, out, config):
    """Fit one model on the full dataset and save it as JSON."""
    cfg = _load_config(config)
    algorithm = _pick(algorithm, cfg, "algorithm", "RF")
    seed = int(_pick(seed, cfg, "seed", 0))
    out = Path(_pick(out, cfg, "out", "model.json"))
    hp = json.loads(hp_json) if hp_json else cfg.get("hyperparameters", {})
    spec = ModelSpec(algorithm, dict(hp), seed=seed)
    ds = transform(_load_dataset(data_path, schema_path, strict))
    model = fit(spec, ds.features, ds.target)
    m = compute_metrics(ds.target, model.predict(ds.features))
    click.echo(f"trained {algorithm} on {ds.n} rows; training "
               f"mae={m.mae:.4f} mse={m.mse:.4f} mape={m.mape:.2f}%")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, out)
    click.echo(f"wrote {out}")


# ---------------------------------------------------------------------------
# explain / report
# ---------------------------------------------------------------------------

def _run_explain(ds, model, model_spec, out_dir: Path, *, shap_method,
                 permutations, background_limit, ale_features, ale_bins,
                 shap3d_features, knn_smooth, do_group_split, seed,
                 inputs, command, params, sm=None):
    outputs: list[Path] = []
    out_dir.mkdir(parents=True, exist_ok=True)
    names = ds.schema.predictor_names

    if sm is None:
        bg = background_sample(ds.features, limit=background_limit, seed=seed)
        sm = shap_matrix(model, ds, bg, method=shap_method,
                         n_permutations=permutations, seed=seed)

    p = out_dir / "shap_matrix.csv"
    p.write_text(shap_matrix_csv(sm))
    outputs.append(p)
    p = out_dir / "shap_matrix.json"
    p.write_text(json.dumps(shap_matrix_sidecar(sm), indent=2, sort_keys=True) + "\n")
    outputs.append(p)

    gi = global_importance(sm)
    p = out_dir / "importance.csv"
    lines = ["feature,total_abs,mean_abs,rank"]
    rank_of = {j: r for r, j in enumerate(gi.ranking)}
    for j, name in enumerate(gi.feature_names):
        lines.append(
            f"{name},{float(gi.total_abs[j])!r},{float(gi.mean_abs[j])!r},"
            f"{rank_of[j]}"
        )
    p.write_text("\n".join(lines) + "\n")
    outputs.append(p)
    top = list(gi.ranking[:15])
    p = out_dir / "importance.svg"
    p.write_text(svgplot.bar_chart(
        [gi.feature_names[j] for j in top], gi.total_abs[top],
        title="Global importance (sum of |attribution|)", x_label="sum |attribution|"))
    outputs.append(p)

    sp = summary_points(sm, ds)
    p = out_dir / "summary_points.csv"
    lines = ["feature,row_id,value,rank_quantile,phi"]
    for j in sp.feature_order:
        for i in range(ds.n):
            lines.append(
                f"{names[j]},{ds.row_ids[i]},{float(sp.raw_values[i, j])!r},"
                f"{float(sp.rank_quantiles[i, j])!r},{float(sp.phi[i, j])!r}"
            )
    p.write_text("\n".join(lines) + "\n")
    outputs.append(p)
    top10 = sp.feature_order[:10]
    xs, ys, cs = [], [], []
    for pos, j in enumerate(top10):
        xs.extend(sp.phi[:, j])
        ys.extend(len(top10) - pos + (sp.rank_quantiles[:, j] - 0.5) * 0.6)
        cs.extend(sp.rank_quantiles[:, j])
    p = out_dir / "summary.svg"
    p.write_text(svgplot.scatter_chart(
        np.array(xs), np.array(ys), np.array(cs),
        title="Attribution summary (top features, color = value rank)",
        x_label="attribution"))
    outputs.append(p)

    p = out_dir / "target_distribution.svg"
    p.write_text(svgplot.histogram_with_normal(
        ds.target, bins=30, title="Log target distribution vs normal",
        x_label=f"log {ds.schema.target_name}"))
    outputs.append(p)

    for feature in ale_features:
        j = ds.schema.predictor_index(feature)
        curve = ale_curve(model, ds, j, k=ale_bins)
        p = out_dir / f"ale_{feature}.csv"
        p.write_text(ale_csv(curve))
        outputs.append(p)
        p = out_dir / f"ale_{feature}.svg"
        p.write_text(svgplot.line_chart(
            curve.edges[1:], curve.accumulated[1:],
            title=f"Accumulated local effects: {feature}",
            x_label=feature, y_label="centered effect"))
        outputs.append(p)

    for feature in shap3d_features:
        j = ds.schema.predictor_index(feature)
        surface = shap3d(sm, ds, j, k_neighbors=knn_smooth)
        thresholds = detect_thresholds(surface)
        p = out_dir / f"shap3d_{feature}_points.csv"
        p.write_text(surface_points_csv(surface))
        outputs.append(p)
        p = out_dir / f"shap3d_{feature}_grid.csv"
        p.write_text(surface_grid_csv(surface))
        outputs.append(p)
        p = out_dir / f"shap3d_{feature}_thresholds.json"
        p.write_text(json.dumps(threshold_sidecar(surface, thresholds),
                                indent=2, sort_keys=True) + "\n")
        outputs.append(p)
        p = out_dir / f"shap3d_{feature}.svg"
        p.write_text(svgplot.line_chart(
            surface.x_grid, surface.z_grid,
            title=f"Smoothed attribution profile: {feature}",
            x_label=feature, y_label="attribution",
            points=(surface.x, surface.z_smooth)))
        outputs.append(p)
        b1, b2 = thresholds.breakpoints
        click.echo(f"{feature}: thresholds at {b1:.3g} and {b2:.3g}; "
                   f"slopes {tuple(round(s, 4) for s in thresholds.slopes)}"
                   + (" (declining final stage)" if thresholds.negative_final_slope
                      else ""))

    if do_group_split:
        split = split_by_gender(ds)
        fem, male = group_importance(model_spec, ds, split, seed=seed,
                                     method=shap_method,
                                     n_permutations=permutations)
        p = out_dir / "group_importance.csv"
        lines = ["feature,female_total_abs,male_total_abs"]
        for j, name in enumerate(names):
            lines.append(
            f"{name},{float(fem.total_abs[j])!r},{float(male.total_abs[j])!r}"
        )
        p.write_text("\n".join(lines) + "\n")
        outputs.append(p)
        top_g = sorted(range(len(names)),
                       key=lambda j: -(fem.total_abs[j] + male.total_abs[j]))[:10]
        p = out_dir / "group_importance.svg"
        p.write_text(svgplot.grouped_bar_chart(
            [names[j] for j in top_g],
            {"female-led": fem.total_abs[top_g], "male-led": male.total_abs[top_g]},
            title="Importance by streamer-gender group",
            x_label="sum |attribution|"))
        outputs.append(p)

    _write_manifest(out_dir, command, params, inputs, outputs)
    click.echo(f"wrote {len(outputs) + 1} files to {out_dir}")
    return gi


_explain_options = [
    click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
                 required=True),
    click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="Saved model JSON; refits RF when omitted."),
    click.option("--algorithm", type=click.Choice(ALGORITHMS), default=None,
                 help="Algorithm to refit when no --model is given."),
    click.option("--schema", "schema_path",
                 type=click.Path(exists=True, dir_okay=False), default=None),
    click.option("--strict", is_flag=True, default=False),
    click.option("--seed", type=int, default=None),
    click.option("--shap", "shap_method", type=click.Choice(["exact", "sampled"]),
                 default=None),
    click.option("--permutations", type=int, default=None),
    click.option("--background", type=int, default=None,
                 help="Background subsample size."),
    click.option("--ale-bins", type=int, default=None),
    click.option("--knn-smooth", type=int, default=None,
                 help="Neighbor count for surface smoothing."),
    click.option("--group-split", is_flag=True, default=False),
    click.option("--out", type=click.Path(file_okay=False), default=None),
]


def _with_options(opts):
    def deco(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn
    return deco


def _prepare_explain(data_path, model_path, algorithm, schema_path, strict,
                     seed, cfg):
    ds = transform(_load_dataset(data_path, schema_path, strict))
    if model_path:
        model = load_model(model_path)
        if model.n_features != ds.p:
            raise ArgumentError(
                f"model expects {model.n_features} features, data has {ds.p}"
            )
        spec = model.spec
    else:
        algorithm = _pick(algorithm, cfg, "algorithm", "RF")
        spec = ModelSpec(algorithm, dict(cfg.get("hyperparameters", {})), seed=seed)
        model = fit(spec, ds.features, ds.target)
    return ds, model, spec


@main.command()
@_with_options(_explain_options)
@click.option("--ale", "ale_features", multiple=True,
              help="Feature name for an ALE curve (repeatable).")
@click.option("--shap3d", "shap3d_features", multiple=True,
              help="Feature name for an attribution surface (repeatable).")
@_config_option
@_guard
def explain(data_path, model_path, algorithm, schema_path, strict, seed,
            shap_method, permutations, background, ale_bins, knn_smooth,
            group_split, out, ale_features, shap3d_features, config):
    """Compute attribution, ALE, and surface artifacts with SVG plots."""
    cfg = _load_config(config)
    seed = int(_pick(seed, cfg, "seed", 0))
    shap_method = _pick(shap_method, cfg, "shap", "sampled")
    permutations = int(_pick(permutations, cfg, "permutations", 100))
    background = int(_pick(background, cfg, "background", 500))
    ale_bins = int(_pick(ale_bins, cfg, "ale_bins", 20))
    out_dir = Path(_pick(out, cfg, "out", "explain_out"))
    ds, model, spec = _prepare_explain(data_path, model_path, algorithm,
                                       schema_path, strict, seed, cfg)
    _run_explain(
        ds, model, spec, out_dir,
        shap_method=shap_method, permutations=permutations,
        background_limit=background,
        ale_features=ale_features, ale_bins=ale_bins,
        shap3d_features=shap3d_features, knn_smooth=knn_smooth,
        do_group_split=group_split, seed=seed,
        inputs=[Path(data_path)] + [Path(p) for p in (model_path, schema_path) if p],
        command="explain",
        params={"seed": seed, "shap": shap_method, "permutations": permutations,
                "background": background, "ale_bins": ale_bins,
                "ale": list(ale_features), "shap3d": list(shap3d_features),
                "group_split": group_split},
    )


@main.command()
@_with_options(_explain_options)
@click.option("--top", type=int, default=3,
              help="How many top features get ALE curves and surfaces.")
@_config_option
@_guard
def report(data_path, model_path, algorithm, schema_path, strict, seed,
           shap_method, permutations, background, ale_bins, knn_smooth,
           group_split, out, top, config):
    """One-stop bundle: attribution artifacts plus ALE curves and surfaces
    for the most important features."""
    cfg = _load_config(config)
    seed = int(_pick(seed, cfg, "seed", 0))
    shap_method = _pick(shap_method, cfg, "shap", "sampled")
    permutations = int(_pick(permutations, cfg, "permutations", 100))
    background = int(_pick(background, cfg, "background", 500))
    ale_bins = int(_pick(ale_bins, cfg, "ale_bins", 20))
    out_dir = Path(_pick(out, cfg, "out", "report_out"))
    ds, model, spec = _prepare_explain(data_path, model_path, algorithm,
                                       schema_path, strict, seed, cfg)
    # rank first with a light pass so the heavy artifacts target top features
    bg = background_sample(ds.features, limit=background, seed=seed)
    sm = shap_matrix(model, ds, bg, method=shap_method,
                     n_permutations=permutations, seed=seed)
    ranking = global_importance(sm).ranking
    chosen = [ds.schema.predictor_names[j] for j in ranking[:max(top, 0)]]
    _run_explain(
        ds, model, spec, out_dir,
        shap_method=shap_method, permutations=permutations,
        background_limit=background,
        ale_features=chosen, ale_bins=ale_bins,
        shap3d_features=chosen, knn_smooth=knn_smooth,
        do_group_split=group_split or "Female" in ds.schema,
        seed=seed,
        inputs=[Path(data_path)] + [Path(p) for p in (model_path, schema_path) if p],
        command="report",
        params={"seed": seed, "shap": shap_method, "permutations": permutations,
                "background": background, "ale_bins": ale_bins, "top": top},
        sm=sm,
    )


if __name__ == "__main__":
    main()

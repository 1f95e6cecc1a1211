"""Per-feature attribution surface over (predictor, outcome) and a
piecewise-linear threshold detector for its smoothed profile.

Raw points are (x = predictor value, y = log target, z = attribution).
Smoothing replaces each z by the mean over its k nearest raw points in
standardized (x, y) space, then projects onto a uniform 100-point x-grid
by the same neighbor averaging along x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset
from ..errors import ArgumentError, InsufficientDataError
from .shapley import ShapMatrix

GRID_POINTS = 100


@dataclass(frozen=True)
class Shap3DSurface:
    feature_index: int
    feature_name: str
    x: np.ndarray  # (n,) predictor values
    y: np.ndarray  # (n,) observed log target
    z_raw: np.ndarray  # (n,) attributions
    z_smooth: np.ndarray  # (n,) neighbor-averaged attributions
    k_neighbors: int
    x_grid: np.ndarray  # (GRID_POINTS,)
    z_grid: np.ndarray  # (GRID_POINTS,)
    row_ids: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.x.shape[0]


def _standardize(v: np.ndarray) -> np.ndarray:
    sd = float(np.std(v))
    return (v - np.mean(v)) / (sd if sd > 0 else 1.0)


def _knn_mean(d2: np.ndarray, z: np.ndarray, k: int) -> float:
    """Mean of z over the k smallest distances; ties broken by index."""
    order = np.argsort(d2, kind="stable")
    return float(np.mean(z[order[:k]]))


def shap3d(sm: ShapMatrix, ds: Dataset, j: int,
           k_neighbors: int | None = None) -> Shap3DSurface:
    if not 0 <= j < ds.p:
        raise ArgumentError(f"feature index {j} out of range [0, {ds.p})")
    if sm.values.shape != (ds.n, ds.p):
        raise ArgumentError(
            f"attribution matrix {sm.values.shape} does not match dataset "
            f"({ds.n}, {ds.p})"
        )
    n = ds.n
    if k_neighbors is None:
        k_neighbors = int(round(np.sqrt(n)))
        k_neighbors = max(1, min(k_neighbors, n))
    if not 1 <= k_neighbors <= n:
        raise ArgumentError(f"k_neighbors must be in [1, {n}], got {k_neighbors}")
    x = ds.features[:, j].astype(float)
    y = ds.target.astype(float)
    z = sm.values[:, j].astype(float)

    xs, ys = _standardize(x), _standardize(y)
    z_smooth = np.empty(n)
    for i in range(n):
        d2 = (xs - xs[i]) ** 2 + (ys - ys[i]) ** 2
        z_smooth[i] = _knn_mean(d2, z, k_neighbors)

    x_grid = np.linspace(float(x.min()), float(x.max()), GRID_POINTS)
    gx = (x_grid - np.mean(x)) / (np.std(x) if np.std(x) > 0 else 1.0)
    z_grid = np.empty(GRID_POINTS)
    for g in range(GRID_POINTS):
        d2 = (xs - gx[g]) ** 2
        z_grid[g] = _knn_mean(d2, z_smooth, k_neighbors)

    return Shap3DSurface(
        feature_index=j,
        feature_name=ds.schema.predictor_names[j],
        x=x, y=y, z_raw=z, z_smooth=z_smooth,
        k_neighbors=k_neighbors,
        x_grid=x_grid, z_grid=z_grid,
        row_ids=tuple(ds.row_ids),
    )


STAGES = ("trough", "rising", "bottleneck")


@dataclass(frozen=True)
class ThresholdReport:
    breakpoints: tuple[float, float]
    thresholds: tuple[tuple[float, str], ...]  # (x, stage ending at x)
    slopes: tuple[float, float, float]
    stages: tuple[str, str, str]
    sse: float
    degenerate: bool  # straight-line input: breakpoints are unreliable
    negative_final_slope: bool  # a declining last stage


def detect_thresholds(surface: Shap3DSurface) -> ThresholdReport:
    """Continuous 3-segment piecewise-linear least-squares fit.

    Every ordered pair of interior grid points is tried as the breakpoint
    pair; the basis [1, x, (x − b1)+, (x − b2)+] keeps the fit continuous.
    """
    xg = np.asarray(surface.x_grid, dtype=float)
    zg = np.asarray(surface.z_grid, dtype=float)
    m = xg.shape[0]
    if m < 6:
        raise InsufficientDataError(
            f"need at least 6 grid points for a 3-segment fit, got {m}"
        )
    best = None
    for i in range(1, m - 3):
        for jj in range(i + 2, m - 1):
            b1, b2 = xg[i], xg[jj]
            A = np.column_stack([
                np.ones(m),
                xg,
                np.maximum(xg - b1, 0.0),
                np.maximum(xg - b2, 0.0),
            ])
            coef, _, _, _ = np.linalg.lstsq(A, zg, rcond=None)
            sse = float(np.sum((A @ coef - zg) ** 2))
            if best is None or sse < best[0] - 1e-15:
                best = (sse, b1, b2, coef)
    sse, b1, b2, coef = best
    s1 = float(coef[1])
    s2 = float(coef[1] + coef[2])
    s3 = float(coef[1] + coef[2] + coef[3])
    scale = max(1.0, abs(s1), abs(s2), abs(s3))
    degenerate = max(abs(s1 - s2), abs(s2 - s3), abs(s1 - s3)) <= 1e-6 * scale
    return ThresholdReport(
        breakpoints=(float(b1), float(b2)),
        thresholds=((float(b1), STAGES[0]), (float(b2), STAGES[1])),
        slopes=(s1, s2, s3),
        stages=STAGES,
        sse=sse,
        degenerate=degenerate,
        negative_final_slope=s3 < 0.0,
    )


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def surface_points_csv(surface: Shap3DSurface) -> str:
    lines = ["row_id,x,y,z,z_smoothed"]
    for i in range(surface.n):
        lines.append(
            f"{surface.row_ids[i]},{float(surface.x[i])!r},{float(surface.y[i])!r},"
            f"{float(surface.z_raw[i])!r},{float(surface.z_smooth[i])!r}"
        )
    return "\n".join(lines) + "\n"


def surface_grid_csv(surface: Shap3DSurface) -> str:
    lines = ["x_grid,z_smoothed"]
    for g in range(surface.x_grid.shape[0]):
        lines.append(f"{float(surface.x_grid[g])!r},{float(surface.z_grid[g])!r}")
    return "\n".join(lines) + "\n"


def threshold_sidecar(surface: Shap3DSurface, report: ThresholdReport) -> dict:
    return {
        "feature": surface.feature_name,
        "k_neighbors": surface.k_neighbors,
        "breakpoints": list(report.breakpoints),
        "slopes": list(report.slopes),
        "stages": list(report.stages),
        "degenerate": report.degenerate,
        "negative_final_slope": report.negative_final_slope,
        # the detector is a heuristic aid, not part of the attribution math
        "note": "thresholds from a 3-segment piecewise-linear least-squares fit",
    }

"""Model-agnostic interpretation: Shapley attributions, ALE curves, and
per-feature attribution surfaces with threshold detection."""

from .shapley import (
    GlobalImportance,
    ShapMatrix,
    SummaryPoints,
    background_sample,
    global_importance,
    group_importance,
    shap_matrix,
    shap_matrix_csv,
    shap_matrix_sidecar,
    shapley_exact,
    shapley_sampled,
    summary_points,
)
from .ale import AleCurve, ale_csv, ale_curve
from .surface3d import (
    Shap3DSurface,
    ThresholdReport,
    detect_thresholds,
    shap3d,
    surface_grid_csv,
    surface_points_csv,
    threshold_sidecar,
)

__all__ = [
    "ShapMatrix",
    "GlobalImportance",
    "SummaryPoints",
    "AleCurve",
    "Shap3DSurface",
    "ThresholdReport",
    "background_sample",
    "shapley_exact",
    "shapley_sampled",
    "shap_matrix",
    "global_importance",
    "group_importance",
    "summary_points",
    "ale_curve",
    "shap3d",
    "detect_thresholds",
    "shap_matrix_csv",
    "shap_matrix_sidecar",
    "ale_csv",
    "surface_points_csv",
    "surface_grid_csv",
    "threshold_sidecar",
]

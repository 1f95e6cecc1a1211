"""Eight regression algorithms behind one fit/predict contract."""

from .base import ALGORITHMS, FittedModel, ModelSpec, defaults, fit, predict
from .tree import DecisionTreeModel, TreeArrays, fit_decision_tree
from .forest import ExtraTreesModel, RandomForestModel, fit_extra_trees, fit_random_forest
from .linear import LinearModel, fit_linear
from .knn import KnnModel, fit_knn
from .svr import SvrModel, fit_svr, kernel_matrix
from .boost import AdaBoostModel, GbrtModel, fit_adaboost, fit_gbrt
from .serialize import load_model, model_from_dict, model_to_dict, save_model

__all__ = [
    "ALGORITHMS",
    "FittedModel",
    "ModelSpec",
    "TreeArrays",
    "DecisionTreeModel",
    "RandomForestModel",
    "ExtraTreesModel",
    "LinearModel",
    "KnnModel",
    "SvrModel",
    "AdaBoostModel",
    "GbrtModel",
    "defaults",
    "fit",
    "predict",
    "fit_decision_tree",
    "fit_random_forest",
    "fit_extra_trees",
    "fit_linear",
    "fit_knn",
    "fit_svr",
    "fit_adaboost",
    "fit_gbrt",
    "kernel_matrix",
    "load_model",
    "save_model",
    "model_to_dict",
    "model_from_dict",
]

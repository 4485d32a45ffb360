"""Native learning machinery: Gini forest, KNN, seeded search, metrics."""

from binviz.learn.forest import ForestConfig, GiniRanking, feature_norms, fit_forest
from binviz.learn.knn import KnnModel, knn_predict
from binviz.learn.metrics import ConfusionMatrix, EvalReport, evaluate
from binviz.learn.search import search_knn

__all__ = [
    "ConfusionMatrix",
    "EvalReport",
    "ForestConfig",
    "GiniRanking",
    "KnnModel",
    "evaluate",
    "feature_norms",
    "fit_forest",
    "knn_predict",
    "search_knn",
]

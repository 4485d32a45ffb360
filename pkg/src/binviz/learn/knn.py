"""K-nearest-neighbors classifier over precomputed feature matrices.

Hyperparameters follow the tuned search space: k, uniform or inverse-
distance vote weighting, and euclidean / manhattan / minkowski (p in
{1, 3}) metrics. Deterministic tie rules: neighbor selection prefers lower
training index among equal distances (stable sort); vote ties go to the
lexicographically smallest label; any zero-distance neighbors decide the
vote by majority among themselves (avoids dividing by zero).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

METRICS = ("euclidean", "manhattan", "minkowski")


@dataclass(frozen=True)
class KnnModel:
    train_features: np.ndarray = field(repr=False)
    train_labels: np.ndarray = field(repr=False)
    k: int = 1
    weights: str = "uniform"
    metric: str = "euclidean"
    p: int = 2

    def __post_init__(self):
        if not 1 <= self.k <= self.train_labels.shape[0]:
            raise ValueError(f"k must be in [1, {self.train_labels.shape[0]}]")
        if self.weights not in ("uniform", "distance"):
            raise ValueError(f"unknown weights: {self.weights}")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric: {self.metric}")
        if self.metric == "minkowski" and self.p not in (1, 3):
            raise ValueError("minkowski p must be 1 or 3")
        if self.metric != "minkowski" and self.p != 2:
            raise ValueError("p is fixed at 2 for non-minkowski metrics")

    def hyperparameters(self):
        return {"k": self.k, "weights": self.weights,
                "metric": self.metric, "p": self.p}


def pairwise_distances(queries, train, metric, p=2):
    if metric == "euclidean":
        return cdist(queries, train, "euclidean")
    if metric == "manhattan":
        return cdist(queries, train, "cityblock")
    if metric == "minkowski":
        return cdist(queries, train, "minkowski", p=p)
    raise ValueError(f"unknown metric: {metric}")


def _vote(labels, dists, weights):
    if weights == "distance":
        zero = dists == 0.0
        if zero.any():
            labels = labels[zero]
            w = np.ones(labels.shape[0])
        else:
            w = 1.0 / dists
    else:
        w = np.ones(labels.shape[0])
    tally = {}
    for lab, wt in zip(labels, w):
        tally[lab] = tally.get(lab, 0.0) + wt
    top = max(tally.values())
    return min(lab for lab, wt in tally.items() if wt == top)


def predict(model, queries):
    """Classify a batch of query vectors."""
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if queries.shape[1] != model.train_features.shape[1]:
        raise ValueError(
            f"query dims {queries.shape[1]} != "
            f"train dims {model.train_features.shape[1]}"
        )
    dists = pairwise_distances(queries, model.train_features, model.metric, model.p)
    nearest = np.argsort(dists, axis=1, kind="stable")[:, : model.k]
    out = np.empty(queries.shape[0], dtype=model.train_labels.dtype)
    for i in range(queries.shape[0]):
        idx = nearest[i]
        out[i] = _vote(model.train_labels[idx], dists[i, idx], model.weights)
    return out


def knn_predict(model, query):
    """Classify a single query vector."""
    return predict(model, np.asarray(query)[None, :])[0]

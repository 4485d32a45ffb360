"""Seeded random hyperparameter search for the KNN classifier.

Uniform sampling over the declared space: k in [1, floor(sqrt(S))] for S
training samples, uniform/distance weighting, euclidean/manhattan/minkowski
metrics, and p in {1, 3} for minkowski (2 otherwise). The best trial by
validation accuracy wins; ties prefer smaller k, then uniform weighting,
then metric declaration order, then smaller p.

Distances and neighbor orderings are cached per (metric, p), so one
expensive sort serves every trial that shares a metric.
"""

import math

import numpy as np

from binviz.learn.knn import METRICS, KnnModel, _vote, pairwise_distances


def sample_trial(rng, k_max):
    """Draw one hyperparameter configuration."""
    k = int(rng.integers(1, k_max + 1))
    weights = ("uniform", "distance")[rng.integers(0, 2)]
    metric = METRICS[rng.integers(0, len(METRICS))]
    p = int((1, 3)[rng.integers(0, 2)]) if metric == "minkowski" else 2
    return {"k": k, "weights": weights, "metric": metric, "p": p}


def _trial_rank(accuracy, trial):
    return (
        -accuracy,
        trial["k"],
        ("uniform", "distance").index(trial["weights"]),
        METRICS.index(trial["metric"]),
        trial["p"],
    )


def search_knn(train_x, train_y, val_x, val_y, budget=20, seed=42, trials_log=None):
    """Random search over the KNN space; returns the winning fitted model."""
    train_x = np.asarray(train_x, dtype=np.float64)
    train_y = np.asarray(train_y)
    val_x = np.asarray(val_x, dtype=np.float64)
    val_y = np.asarray(val_y)
    if val_y.shape[0] == 0:
        raise ValueError("validation set is empty")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    k_max = max(1, math.floor(math.sqrt(train_y.shape[0])))
    rng = np.random.default_rng(seed)

    cache = {}

    def neighbor_order(metric, p):
        key = (metric, p)
        if key not in cache:
            dists = pairwise_distances(val_x, train_x, metric, p)
            cache[key] = (dists, np.argsort(dists, axis=1, kind="stable"))
        return cache[key]

    best_rank, best_trial = None, None
    for _ in range(budget):
        trial = sample_trial(rng, k_max)
        dists, order = neighbor_order(trial["metric"], trial["p"])
        correct = 0
        for i in range(val_y.shape[0]):
            idx = order[i, : trial["k"]]
            pred = _vote(train_y[idx], dists[i, idx], trial["weights"])
            correct += pred == val_y[i]
        accuracy = correct / val_y.shape[0]
        if trials_log is not None:
            trials_log.append({**trial, "val_accuracy": accuracy})
        rank = _trial_rank(accuracy, trial)
        if best_rank is None or rank < best_rank:
            best_rank, best_trial = rank, trial
    return KnnModel(train_features=train_x, train_labels=train_y, **best_trial)

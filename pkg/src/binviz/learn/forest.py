"""Random forest of CART trees, used for Gini feature importance.

The forest exists to rank byte-value features for the spiral image, so only
fitting and importance extraction are implemented. Trees grow to purity on
bootstrap samples, scoring splits by Gini impurity decrease. The importance
of a feature is the mean over trees of the summed (node fraction x impurity
decrease) of the nodes split on it, normalized to sum 1.

All tie-breaking is total so independent reimplementations agree: equal
split gains keep the earlier candidate in the node's drawn candidate list
(within a feature, the lower threshold); the final ranking tie-breaks on
lower feature index. Candidate-list-order ties keep importances
permutation-equivariant when candidate lists are remapped alongside the
columns. Trees consume independent RNG streams seeded from (seed, tree
index), so training is order-independent.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from binviz.rng import subseed


@dataclass(frozen=True)
class ForestConfig:
    trees: int = 100
    max_features: int = 16
    min_leaf: int = 1
    seed: int = 42


@dataclass(frozen=True)
class GiniRanking:
    """Byte-value features ordered by descending Gini importance.

    ``importances`` is indexed by feature; ``importances[order]`` is
    non-increasing.
    """

    order: np.ndarray
    importances: np.ndarray = field(repr=False)

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rank", "byte_value", "importance"])
            for rank, feat in enumerate(self.order):
                writer.writerow([rank, int(feat), repr(float(self.importances[feat]))])


def _gini(counts, n):
    p = counts / n
    return 1.0 - (p * p).sum()


def _best_split(x_col, y_onehot, min_leaf):
    """Best (gain, threshold) along one feature column, or None.

    ``gain`` is the within-node impurity decrease
    g(node) - (nl/n) g(left) - (nr/n) g(right).
    """
    n = x_col.shape[0]
    order = np.argsort(x_col, kind="stable")
    sx = x_col[order]
    cum = np.cumsum(y_onehot[order], axis=0)
    total = cum[-1]
    # candidate boundaries t: split between positions t and t+1
    valid = sx[:-1] < sx[1:]
    if min_leaf > 1:
        t = np.arange(n - 1)
        valid &= (t + 1 >= min_leaf) & (n - t - 1 >= min_leaf)
    if not valid.any():
        return None
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    left = cum[:-1]
    right = total[None, :] - left
    gl = 1.0 - ((left / nl[:, None]) ** 2).sum(axis=1)
    gr = 1.0 - ((right / nr[:, None]) ** 2).sum(axis=1)
    g_node = _gini(total.astype(np.float64), n)
    gains = g_node - (nl * gl + nr * gr) / n
    gains[~valid] = -np.inf
    best = int(np.argmax(gains))  # first max: lowest threshold on ties
    return gains[best], (sx[best] + sx[best + 1]) / 2.0


def _grow_tree(x, y_onehot, root_idx, max_features, min_leaf, rng,
               importances, candidate_source=None):
    n_root = root_idx.shape[0]
    n_features = x.shape[1]
    all_features = np.arange(n_features)
    stack = [root_idx]
    while stack:
        idx = stack.pop()
        n = idx.shape[0]
        counts = y_onehot[idx].sum(axis=0).astype(np.float64)
        g_node = _gini(counts, n)
        if g_node <= 0.0 or n < 2 or n < 2 * min_leaf:
            continue
        if candidate_source is not None:
            candidates = np.asarray(candidate_source(rng, n_features))
        elif max_features >= n_features:
            candidates = all_features
        else:
            candidates = rng.permutation(n_features)[:max_features]
        best_gain, best_feat, best_thr = 0.0, -1, 0.0
        for f in candidates:
            found = _best_split(x[idx, f], y_onehot[idx], min_leaf)
            if found is None:
                continue
            gain, thr = found
            if gain > best_gain:  # ties keep the earlier candidate
                best_gain, best_feat, best_thr = gain, f, thr
        if best_feat < 0 or best_gain <= 0.0:
            continue
        importances[best_feat] += (n / n_root) * best_gain
        mask = x[idx, best_feat] <= best_thr
        stack.append(idx[mask])
        stack.append(idx[~mask])


def fit_forest(features, labels, cfg=ForestConfig(), candidate_source=None):
    """Fit the forest and return the Gini importance ranking.

    ``candidate_source`` overrides per-node feature subsampling (testing
    hook: it receives (rng, n_features) once per expanded node, in growth
    order).
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    if not np.isfinite(x).all():
        raise ValueError("features must be finite")
    labels = np.asarray(labels)
    classes, y = np.unique(labels, return_inverse=True)
    if classes.shape[0] < 2:
        raise ValueError("need >= 2 classes to fit a forest")
    n, n_features = x.shape
    if not 1 <= cfg.max_features <= n_features:
        raise ValueError(f"max_features must be in [1, {n_features}]")
    y_onehot = np.zeros((n, classes.shape[0]), dtype=np.int64)
    y_onehot[np.arange(n), y] = 1

    total = np.zeros(n_features, dtype=np.float64)
    for t in range(cfg.trees):
        rng = np.random.default_rng(subseed(cfg.seed, t))
        boot = rng.integers(0, n, n)
        imp = np.zeros(n_features, dtype=np.float64)
        _grow_tree(x, y_onehot, boot, cfg.max_features, cfg.min_leaf, rng,
                   imp, candidate_source)
        total += imp
    importances = total / cfg.trees
    s = importances.sum()
    if s > 0:
        importances = importances / s
        order = np.argsort(-importances, kind="stable")
    else:
        order = np.arange(n_features)
    return GiniRanking(order=order, importances=importances)


def feature_norms(features):
    """Column-wise (min, max) over a feature matrix (training scope)."""
    x = np.asarray(features, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty feature matrix")
    return x.min(axis=0), x.max(axis=0)

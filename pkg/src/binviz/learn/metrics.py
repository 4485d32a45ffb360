"""Confusion matrix and classification metrics.

Per-class precision, recall, and F1 follow the usual TP/FP/FN definitions
with 0/0 defined as 0. The headline numbers are macro averages; weighted
averages are carried alongside for comparison since balanced test sets make
the two coincide for recall but not necessarily for precision/F1.
"""

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple
    counts: np.ndarray = field(repr=False)  # rows true, cols predicted

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["true\\pred"] + list(self.labels))
            for lab, row in zip(self.labels, self.counts):
                writer.writerow([lab] + [int(v) for v in row])


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    per_class: dict
    confusion: ConfusionMatrix
    chosen_hyperparameters: dict

    def metrics_dict(self):
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
        }

    def to_dict(self):
        return {
            "metrics": self.metrics_dict(),
            "per_class": self.per_class,
            "labels": list(self.confusion.labels),
            "confusion": [[int(v) for v in row] for row in self.confusion.counts],
            "chosen_hyperparameters": self.chosen_hyperparameters,
        }


def _ratio(num, den):
    return num / den if den > 0 else 0.0


def evaluate(predictions, truth, label_order, chosen_hyperparameters=None):
    """Score predictions against truth over a fixed label ordering."""
    predictions = list(predictions)
    truth = list(truth)
    if len(predictions) != len(truth) or not truth:
        raise ValueError("predictions and truth must have equal nonzero length")
    labels = tuple(label_order)
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(truth, predictions):
        if t not in index:
            raise ValueError(f"unknown truth label: {t!r}")
        if p not in index:
            raise ValueError(f"unknown predicted label: {p!r}")
        counts[index[t], index[p]] += 1

    support = counts.sum(axis=1)
    tp = np.diag(counts).astype(np.float64)
    fp = counts.sum(axis=0) - tp
    fn = support - tp
    per_class = {}
    precisions, recalls, f1s = [], [], []
    for i, lab in enumerate(labels):
        prec = _ratio(tp[i], tp[i] + fp[i])
        rec = _ratio(tp[i], tp[i] + fn[i])
        f1 = _ratio(2.0 * prec * rec, prec + rec)
        per_class[lab] = {
            "precision": prec, "recall": rec, "f1": f1, "support": int(support[i]),
        }
        precisions.append(prec)
        recalls.append(rec)
        f1s.append(f1)

    total = counts.sum()
    weights = support / total
    return EvalReport(
        accuracy=float(tp.sum() / total),
        precision=float(np.mean(precisions)),
        recall=float(np.mean(recalls)),
        f1=float(np.mean(f1s)),
        weighted_precision=float(np.dot(weights, precisions)),
        weighted_recall=float(np.dot(weights, recalls)),
        weighted_f1=float(np.dot(weights, f1s)),
        per_class=per_class,
        confusion=ConfusionMatrix(labels=labels, counts=counts),
        chosen_hyperparameters=dict(chosen_hyperparameters or {}),
    )

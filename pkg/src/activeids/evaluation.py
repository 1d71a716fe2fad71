"""Confusion-matrix metrics and cross-run distribution summaries.

Positive class is attack (1). Undefined metrics raise instead of
defaulting to 0 so summary averages never silently absorb them.
"""

import csv
from dataclasses import dataclass

import numpy as np


class UndefinedMetricError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(pred, truth) -> ConfusionMatrix:
    pred = np.asarray(pred, dtype=np.int8)
    truth = np.asarray(truth, dtype=np.int8)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    return ConfusionMatrix(
        tp=int(((pred == 1) & (truth == 1)).sum()),
        tn=int(((pred == 0) & (truth == 0)).sum()),
        fp=int(((pred == 1) & (truth == 0)).sum()),
        fn=int(((pred == 0) & (truth == 1)).sum()),
    )


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise UndefinedMetricError("accuracy undefined on an empty matrix")
    return (cm.tp + cm.tn) / cm.total


def sensitivity(cm: ConfusionMatrix) -> float:
    """True positive rate TP/(TP+FN): fraction of actual attacks detected."""
    if cm.tp + cm.fn == 0:
        raise UndefinedMetricError("sensitivity undefined without actual positives")
    return cm.tp / (cm.tp + cm.fn)


def fpr(cm: ConfusionMatrix) -> float:
    """False positive rate FP/(FP+TN)."""
    if cm.fp + cm.tn == 0:
        raise UndefinedMetricError("fpr undefined without actual negatives")
    return cm.fp / (cm.fp + cm.tn)


METRICS = ("accuracy", "sensitivity", "fpr")


@dataclass(frozen=True)
class MetricAggregate:
    mean: float
    min: float
    q1: float
    median: float
    q3: float
    max: float


@dataclass(frozen=True)
class MetricsSummary:
    """Per-run metric rows plus recomputable aggregates per metric."""

    per_run: tuple[dict, ...]
    aggregates: dict[str, MetricAggregate]


def run_metrics(cm: ConfusionMatrix) -> dict:
    return {"accuracy": accuracy(cm), "sensitivity": sensitivity(cm), "fpr": fpr(cm)}


def summarize(runs) -> MetricsSummary:
    """Aggregate per-run metric dicts; quartiles by linear interpolation."""
    runs = tuple(dict(r) for r in runs)
    if not runs:
        raise ValueError("no runs to summarize")
    aggregates = {}
    for metric in METRICS:
        values = np.asarray([r[metric] for r in runs], dtype=np.float64)
        q1, median, q3 = np.percentile(values, [25, 50, 75], method="linear")
        aggregates[metric] = MetricAggregate(
            mean=float(values.mean()),
            min=float(values.min()),
            q1=float(q1),
            median=float(median),
            q3=float(q3),
            max=float(values.max()),
        )
    return MetricsSummary(per_run=runs, aggregates=aggregates)


def summary_to_csv(summary: MetricsSummary, path, extra: dict | None = None) -> None:
    """Export one row per run followed by one aggregate row per metric."""
    extra = extra or {}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [*extra.keys(), "kind", "run", "metric",
             "value", "mean", "min", "q1", "median", "q3", "max"]
        )
        for i, run in enumerate(summary.per_run):
            for metric in METRICS:
                writer.writerow(
                    [*extra.values(), "run", i, metric, repr(run[metric]),
                     "", "", "", "", "", ""]
                )
        for metric in METRICS:
            agg = summary.aggregates[metric]
            writer.writerow(
                [*extra.values(), "aggregate", "", metric, "", repr(agg.mean),
                 repr(agg.min), repr(agg.q1), repr(agg.median), repr(agg.q3), repr(agg.max)]
            )

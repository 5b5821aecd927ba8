"""Evaluation metrics and the serializable evaluation report.

Conventions: macro-F1 averages per-class F1 over all classes, scoring an
absent class's term as 0; balanced accuracy averages recall over classes
present in the labels; AUC is macro one-vs-rest by the rank statistic with
ties counted half, excluding (with a warning) classes lacking positives or
negatives; QWK uses quadratic weights (i - j)^2 / (C - 1)^2 with the
0/0 -> 1 convention for degenerate denominators.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from ..errors import ContractViolation


def confusion_matrix(labels: np.ndarray, predictions: np.ndarray, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    matrix = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(matrix, (labels, predictions), 1)
    return matrix


def accuracy_score(confusion: np.ndarray) -> float:
    return float(np.trace(confusion) / confusion.sum())


def macro_f1_score(confusion: np.ndarray) -> float:
    n_classes = confusion.shape[0]
    terms = []
    for c in range(n_classes):
        tp = confusion[c, c]
        fp = confusion[:, c].sum() - tp
        fn = confusion[c, :].sum() - tp
        denominator = 2 * tp + fp + fn
        terms.append(0.0 if denominator == 0 else 2.0 * tp / denominator)
    return float(np.mean(terms))


def balanced_accuracy_score(confusion: np.ndarray) -> float:
    rows = confusion.sum(axis=1)
    present = rows > 0
    if not present.any():
        raise ContractViolation("no labels present")
    recalls = np.diag(confusion)[present] / rows[present]
    return float(np.mean(recalls))


def auc_macro_ovr(labels: np.ndarray, probabilities: np.ndarray):
    """Macro one-vs-rest AUC via average ranks (ties count half).

    Returns (auc, excluded_classes); classes with no positives or no
    negatives are excluded. auc is NaN when every class is excluded.
    """
    labels = np.asarray(labels, dtype=np.int64)
    probabilities = np.asarray(probabilities, dtype=np.float64)
    if probabilities.ndim != 2 or probabilities.shape[0] != labels.shape[0]:
        raise ContractViolation("probabilities must be (n, C) aligned with labels")
    n_classes = probabilities.shape[1]
    aucs, excluded = [], []
    for c in range(n_classes):
        positive = labels == c
        n_pos = int(positive.sum())
        n_neg = labels.shape[0] - n_pos
        if n_pos == 0 or n_neg == 0:
            excluded.append(c)
            continue
        ranks = rankdata(probabilities[:, c], method="average")
        u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
        aucs.append(u / (n_pos * n_neg))
    if not aucs:
        return float("nan"), excluded
    return float(np.mean(aucs)), excluded


def quadratic_weighted_kappa(confusion: np.ndarray) -> float:
    n_classes = confusion.shape[0]
    total = confusion.sum()
    if total == 0:
        raise ContractViolation("empty confusion matrix")
    if n_classes == 1:
        return 1.0
    observed = confusion / total
    row_marginals = observed.sum(axis=1)
    col_marginals = observed.sum(axis=0)
    expected = np.outer(row_marginals, col_marginals)
    i, j = np.indices((n_classes, n_classes))
    weights = (i - j) ** 2 / (n_classes - 1) ** 2
    numerator = float((weights * observed).sum())
    denominator = float((weights * expected).sum())
    if denominator == 0.0:
        return 1.0 if numerator == 0.0 else 0.0
    return 1.0 - numerator / denominator


@dataclass
class EvalReport:
    """All Table-style metrics plus the raw per-subject predictions."""

    accuracy: float
    macro_f1: float
    balanced_accuracy: float
    auc_macro_ovr: float
    qwk: float
    confusion: np.ndarray
    subject_ids: list
    labels: np.ndarray
    predictions: np.ndarray
    probabilities: np.ndarray
    auc_excluded_classes: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def compute_metrics(
    labels,
    predictions,
    probabilities,
    subject_ids=None,
    n_classes: int | None = None,
    meta: dict | None = None,
) -> EvalReport:
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    probabilities = np.asarray(probabilities, dtype=np.float64)
    if labels.shape != predictions.shape or labels.ndim != 1 or labels.size == 0:
        raise ContractViolation("labels and predictions must be aligned non-empty 1-D arrays")
    if probabilities.shape[0] != labels.shape[0]:
        raise ContractViolation("probabilities rows must align with labels")
    if not np.allclose(probabilities.sum(axis=1), 1.0, atol=1e-9):
        raise ContractViolation("probability rows must sum to 1")
    if n_classes is None:
        n_classes = probabilities.shape[1]
    if subject_ids is None:
        subject_ids = list(range(labels.shape[0]))

    confusion = confusion_matrix(labels, predictions, n_classes)
    auc, excluded = auc_macro_ovr(labels, probabilities)
    warnings = []
    if excluded:
        warnings.append(
            "AUC undefined for classes "
            + ",".join(map(str, excluded))
            + " (no positives or no negatives); excluded from the macro average"
        )
    if math.isnan(auc):
        warnings.append("AUC undefined for every class")
    return EvalReport(
        accuracy=accuracy_score(confusion),
        macro_f1=macro_f1_score(confusion),
        balanced_accuracy=balanced_accuracy_score(confusion),
        auc_macro_ovr=auc,
        qwk=quadratic_weighted_kappa(confusion),
        confusion=confusion,
        subject_ids=list(subject_ids),
        labels=labels,
        predictions=predictions,
        probabilities=probabilities,
        auc_excluded_classes=excluded,
        warnings=warnings,
        meta=dict(meta or {}),
    )


def report_to_dict(report: EvalReport) -> dict:
    auc = report.auc_macro_ovr
    return {
        "metrics": {
            "accuracy": report.accuracy,
            "macro_f1": report.macro_f1,
            "balanced_accuracy": report.balanced_accuracy,
            "auc_macro_ovr": None if math.isnan(auc) else auc,
            "qwk": report.qwk,
        },
        "confusion": report.confusion.tolist(),
        "subjects": [
            {
                "subject_id": sid,
                "label": int(lab),
                "prediction": int(pred),
                "probabilities": probs.tolist(),
            }
            for sid, lab, pred, probs in zip(
                report.subject_ids, report.labels, report.predictions, report.probabilities
            )
        ],
        "auc_excluded_classes": list(report.auc_excluded_classes),
        "warnings": list(report.warnings),
        "meta": report.meta,
    }


def report_from_dict(payload: dict) -> EvalReport:
    subjects = payload["subjects"]
    metrics = payload["metrics"]
    auc = metrics["auc_macro_ovr"]
    return EvalReport(
        accuracy=metrics["accuracy"],
        macro_f1=metrics["macro_f1"],
        balanced_accuracy=metrics["balanced_accuracy"],
        auc_macro_ovr=float("nan") if auc is None else auc,
        qwk=metrics["qwk"],
        confusion=np.array(payload["confusion"], dtype=np.int64),
        subject_ids=[s["subject_id"] for s in subjects],
        labels=np.array([s["label"] for s in subjects], dtype=np.int64),
        predictions=np.array([s["prediction"] for s in subjects], dtype=np.int64),
        probabilities=np.array([s["probabilities"] for s in subjects], dtype=np.float64),
        auc_excluded_classes=list(payload.get("auc_excluded_classes", [])),
        warnings=list(payload.get("warnings", [])),
        meta=dict(payload.get("meta", {})),
    )


def write_report_json(path: str | Path, report: EvalReport) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report), indent=2) + "\n")


def read_report_json(path: str | Path) -> EvalReport:
    return report_from_dict(json.loads(Path(path).read_text()))


def write_confusion_csv(path: str | Path, report: EvalReport) -> None:
    n = report.confusion.shape[0]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true\\pred"] + [f"pred_{c}" for c in range(n)])
        for c in range(n):
            writer.writerow([f"true_{c}"] + report.confusion[c].tolist())


def write_predictions_csv(path: str | Path, report: EvalReport) -> None:
    n_classes = report.probabilities.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["subject_id", "label", "pred"] + [f"prob_{c}" for c in range(n_classes)]
        )
        for sid, lab, pred, probs in zip(
            report.subject_ids, report.labels, report.predictions, report.probabilities
        ):
            writer.writerow([sid, int(lab), int(pred)] + [repr(p) for p in probs])

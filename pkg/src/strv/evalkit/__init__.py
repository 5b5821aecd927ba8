"""Evaluation toolkit: classifier head, metrics, reports, and baselines."""

from .baselines import (
    MARGINAL_DRAWS,
    TAG_MARGINAL,
    TAG_RANDOM_SETS,
    baseline_all_radiomics,
    baseline_marginal_topk,
    baseline_random_sets,
    evaluate_retrieval,
    marginal_relevance,
)
from .classifier import (
    HEAD_FIT_STEPS,
    classify,
    classify_batch,
    ensemble_predict,
    fit_classifier_head,
    predict_with_head,
)
from .metrics import (
    EvalReport,
    accuracy_score,
    auc_macro_ovr,
    balanced_accuracy_score,
    compute_metrics,
    confusion_matrix,
    macro_f1_score,
    quadratic_weighted_kappa,
    read_report_json,
    report_from_dict,
    report_to_dict,
    write_confusion_csv,
    write_predictions_csv,
    write_report_json,
)

__all__ = [
    "MARGINAL_DRAWS",
    "TAG_MARGINAL",
    "TAG_RANDOM_SETS",
    "baseline_all_radiomics",
    "baseline_marginal_topk",
    "baseline_random_sets",
    "evaluate_retrieval",
    "marginal_relevance",
    "HEAD_FIT_STEPS",
    "classify",
    "classify_batch",
    "ensemble_predict",
    "fit_classifier_head",
    "predict_with_head",
    "EvalReport",
    "accuracy_score",
    "auc_macro_ovr",
    "balanced_accuracy_score",
    "compute_metrics",
    "confusion_matrix",
    "macro_f1_score",
    "quadratic_weighted_kappa",
    "read_report_json",
    "report_from_dict",
    "report_to_dict",
    "write_confusion_csv",
    "write_predictions_csv",
    "write_report_json",
]

"""Validation-split evaluation of retrieval and the comparison baselines.

Every method ends in the same place: a linear head over some feature
representation, scored on the validation subjects. Retrieval uses the
jointly trained classifier over top-set embeddings (with top-3 logit
ensembling); the baselines refit a head with identical gradient-descent
treatment for fairness. Random draws are keyed by (seed, stream tag,
subject), so reports are reproducible per seed.
"""

from __future__ import annotations

import numpy as np

from ..cohort import draw_support_query
from ..config import RetrievalConfig
from ..errors import ContractViolation
from ..model import ModelBundle, raw_view
from ..probe import rewards_for_sets
from ..retrieval import run_retrieval, sample_sets
from ..setenc import encode_sets, token_outputs
from .classifier import (
    HEAD_FIT_STEPS,
    ensemble_predict,
    fit_classifier_head,
    predict_with_head,
)
from .metrics import EvalReport, compute_metrics

TAG_RANDOM_SETS = 31
TAG_MARGINAL = 32

MARGINAL_DRAWS = 5


def _rng(*parts: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(parts)))


def _subject_names(data, indices) -> list:
    return [data.subject_names[int(i)] for i in indices]


def evaluate_retrieval(bundle: ModelBundle, data, config: RetrievalConfig) -> EvalReport:
    """Retrieve a set per validation subject, classify, ensemble top-3."""
    selections, _ = run_retrieval(bundle, data, config, data.val_ids)
    enc_raw, cls = raw_view(bundle.encoder), raw_view(bundle.classifier)
    predictions, probabilities = [], []
    for selection in selections:
        subject = int(selection.subject_id)
        out = token_outputs(data.features[subject], data.ids, enc_raw)
        n_ens = min(config.ensemble_size, selection.ensemble_sets.shape[0])
        embeddings = encode_sets(out, selection.ensemble_sets[:n_ens])
        _, probs, pred = ensemble_predict(embeddings, cls)
        predictions.append(pred)
        probabilities.append(probs)
    return compute_metrics(
        data.labels[data.val_ids],
        np.array(predictions),
        np.stack(probabilities),
        subject_ids=_subject_names(data, data.val_ids),
        n_classes=data.n_classes,
        meta={"method": "retrieval", "k": config.k, "seed": config.seed},
    )


def baseline_random_sets(
    bundle: ModelBundle, data, config: RetrievalConfig, seed: int
) -> EvalReport:
    """One uniform random k-set per subject; head refit on train subjects."""
    enc_raw = raw_view(bundle.encoder)

    def embed_random(subject: int) -> np.ndarray:
        rng = _rng(seed, TAG_RANDOM_SETS, subject)
        chosen = sample_sets(data.n_features, config.k, 1, rng)
        out = token_outputs(data.features[subject], data.ids, enc_raw)
        return encode_sets(out, chosen)[0]

    train_embeddings = np.stack([embed_random(int(s)) for s in data.train_ids])
    val_embeddings = np.stack([embed_random(int(s)) for s in data.val_ids])
    W, b = fit_classifier_head(
        train_embeddings, data.labels[data.train_ids], data.n_classes
    )
    _, probabilities, predictions = predict_with_head(val_embeddings, W, b)
    return compute_metrics(
        data.labels[data.val_ids],
        predictions,
        probabilities,
        subject_ids=_subject_names(data, data.val_ids),
        n_classes=data.n_classes,
        meta={"method": "random_sets", "k": config.k, "seed": seed},
    )


def baseline_all_radiomics(data, config: RetrievalConfig, seed: int = 0) -> EvalReport:
    """Linear classifier on the full normalized feature vector."""
    W, b, _ = _fit_feature_head(data, np.arange(data.n_features))
    _, probabilities, predictions = predict_with_head(
        data.features[data.val_ids], W, b
    )
    return compute_metrics(
        data.labels[data.val_ids],
        predictions,
        probabilities,
        subject_ids=_subject_names(data, data.val_ids),
        n_classes=data.n_classes,
        meta={"method": "all_radiomics", "k": data.n_features, "seed": seed},
    )


def _fit_feature_head(data, indices: np.ndarray):
    X = data.features[data.train_ids][:, indices]
    W, b = fit_classifier_head(X, data.labels[data.train_ids], data.n_classes)
    return W, b, indices


def marginal_relevance(data, config: RetrievalConfig, seed: int) -> np.ndarray:
    """Per-feature relevance: single-feature probe reward, averaged over
    MARGINAL_DRAWS support/query draws. Population-level (subject-free)."""
    singles = np.arange(data.n_features, dtype=np.int64)[:, None]
    totals = np.zeros(data.n_features)
    for draw in range(MARGINAL_DRAWS):
        rng = _rng(seed, TAG_MARGINAL, draw)
        support, query = draw_support_query(
            data.train_ids, data.labels, config.n_support, config.n_query, rng
        )
        totals += rewards_for_sets(
            singles, support, query, data.features, data.labels,
            data.n_classes, config.probe_steps,
        )
    return totals / MARGINAL_DRAWS


def baseline_marginal_topk(
    data, config: RetrievalConfig, seed: int, k: int | None = None
) -> tuple[EvalReport, np.ndarray]:
    """Global top-k features by marginal relevance; linear head on them."""
    k = config.k if k is None else k
    if not 0 < k <= data.n_features:
        raise ContractViolation(f"k={k} outside [1, {data.n_features}]")
    relevance = marginal_relevance(data, config, seed)
    top = np.sort(np.argsort(-relevance, kind="stable")[:k])
    W, b, _ = _fit_feature_head(data, top)
    _, probabilities, predictions = predict_with_head(
        data.features[data.val_ids][:, top], W, b
    )
    report = compute_metrics(
        data.labels[data.val_ids],
        predictions,
        probabilities,
        subject_ids=_subject_names(data, data.val_ids),
        n_classes=data.n_classes,
        meta={"method": "marginal_topk", "k": int(k), "seed": seed},
    )
    return report, top

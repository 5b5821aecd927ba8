"""Linear classification head over set embeddings, with top-3 ensembling."""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation
from ..numkit import softmax
from ..probe import fit_probe

HEAD_FIT_STEPS = 300


def _check_embedding_dim(embeddings: np.ndarray, weight: np.ndarray) -> None:
    if embeddings.shape[-1] != weight.shape[0]:
        raise ContractViolation(
            f"embedding width {embeddings.shape[-1]} != classifier input {weight.shape[0]}"
        )


def classify_batch(embeddings: np.ndarray, classifier):
    """(n, d) embeddings -> (logits, probabilities, predictions).

    Predictions break ties toward the lowest class index.
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.ndim != 2:
        raise ContractViolation(f"expected (n, d) embeddings, got shape {embeddings.shape}")
    _check_embedding_dim(embeddings, classifier.w)
    logits = embeddings @ classifier.w + classifier.b
    probabilities = softmax(logits, axis=1)
    predictions = np.argmax(logits, axis=1)
    return logits, probabilities, predictions


def classify(embedding: np.ndarray, classifier):
    """Single embedding -> (logits (C,), probabilities (C,), predicted class)."""
    embedding = np.asarray(embedding, dtype=np.float64)
    if embedding.ndim != 1:
        raise ContractViolation(f"expected a 1-D embedding, got shape {embedding.shape}")
    logits, probabilities, predictions = classify_batch(embedding[None], classifier)
    return logits[0], probabilities[0], int(predictions[0])


def ensemble_predict(embeddings: np.ndarray, classifier):
    """Average the logits of 1-3 set embeddings, then softmax and argmax."""
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.ndim != 2 or not 1 <= embeddings.shape[0] <= 3:
        raise ContractViolation("ensemble_predict takes a (m, d) stack with 1 <= m <= 3")
    logits, _, _ = classify_batch(embeddings, classifier)
    mean_logits = logits.mean(axis=0)
    probabilities = softmax(mean_logits, axis=-1)
    return mean_logits, probabilities, int(np.argmax(mean_logits))


def fit_classifier_head(
    embeddings: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    steps: int = HEAD_FIT_STEPS,
):
    """Refit a linear head by full-batch gradient descent; returns (W, b).

    Used by the comparison baselines so every method gets the same head
    training treatment.
    """
    W, b, _ = fit_probe(embeddings, labels, n_classes, steps=steps)
    return W, b


def predict_with_head(features: np.ndarray, W: np.ndarray, b: np.ndarray):
    """Raw linear head inference: (logits, probabilities, predictions)."""
    features = np.asarray(features, dtype=np.float64)
    logits = features @ W + b
    probabilities = softmax(logits, axis=1)
    return logits, probabilities, np.argmax(logits, axis=1)

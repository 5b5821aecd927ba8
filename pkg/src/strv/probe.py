"""Linear probe reward: how well a feature subset separates the classes.

A zero-initialized linear classifier is fit on the support subjects'
selected feature columns by full-batch gradient descent, then evaluated on
disjoint query subjects. The reward is the negative mean query
cross-entropy, so rewards are <= 0 and a probe evaluated before any step
scores exactly -ln(n_classes).

The default step size is 0.5 / (2 + max_row_norm^2 / 4), which sits below
the inverse curvature bound of softmax cross-entropy with a bias column,
so the support loss decreases monotonically.

All fits run through one batched code path (B probe instances at once via
einsum); the single-instance helpers wrap it with B = 1, so batched and
scalar results match bitwise. Feature index sets are canonicalized by
ascending sort before any arithmetic, making the reward independent of the
order the set was presented in.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation, DegenerateSupportError


def safe_learning_rate(features: np.ndarray) -> np.ndarray:
    """Guaranteed-descent step size; features (..., n, d) -> (...,)."""
    sq_norms = np.square(np.asarray(features, dtype=np.float64)).sum(axis=-1)
    return 0.5 / (2.0 + sq_norms.max(axis=-1) / 4.0)


def _check_labels(y: np.ndarray, n_classes: int, role: str) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64)
    if y.ndim != 1 or y.size == 0:
        raise ContractViolation(f"{role} labels must be a non-empty 1-D array")
    if y.min() < 0 or y.max() >= n_classes:
        raise ContractViolation(f"{role} labels outside [0, {n_classes})")
    return y


def _batch_ce_and_probs(X: np.ndarray, y: np.ndarray, W: np.ndarray, b: np.ndarray):
    logits = X @ W + b[:, None, :]
    logits = logits - logits.max(axis=2, keepdims=True)
    expl = np.exp(logits)
    probs = expl / expl.sum(axis=2, keepdims=True)
    picked = np.take_along_axis(probs, y[None, :, None].repeat(X.shape[0], axis=0), axis=2)
    ce = -np.mean(np.log(np.maximum(picked[:, :, 0], 1e-300)), axis=1)
    return ce, probs


def probe_ce_and_grads(X: np.ndarray, y: np.ndarray, W: np.ndarray, b: np.ndarray):
    """Support CE and its (dW, db) for one probe instance; for grad checks."""
    y = np.asarray(y, dtype=np.int64)
    ce, probs = _batch_ce_and_probs(np.asarray(X, dtype=np.float64)[None], y, W[None], b[None])
    n = X.shape[0]
    delta = probs[0].copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    return ce[0], X.T @ delta, delta.sum(axis=0)


def fit_probe_batch(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    steps: int,
    lr: np.ndarray | float | None = None,
):
    """Fit B zero-initialized probes on (B, n, d) support features.

    Returns (W (B, d, C), b (B, C), losses (steps + 1, B)); losses[t] is the
    support CE before update t, losses[-1] the final CE. steps = 0 leaves
    the parameters at zero (evaluate-before-any-step semantics).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 3:
        raise ContractViolation(f"batched support features must be (B, n, d), got {X.shape}")
    if steps < 0:
        raise ContractViolation("steps must be >= 0")
    y = _check_labels(y, n_classes, "support")
    if np.unique(y).size < 2:
        raise DegenerateSupportError("support draw contains a single class")
    batch, n, dim = X.shape
    if y.shape[0] != n:
        raise ContractViolation("support feature/label row counts differ")
    if lr is None:
        lr = safe_learning_rate(X)
    else:
        lr = np.broadcast_to(np.asarray(lr, dtype=np.float64), (batch,)).copy()
    W = np.zeros((batch, dim, n_classes))
    b = np.zeros((batch, n_classes))
    losses = np.empty((steps + 1, batch))
    onehot_rows = np.arange(n)
    for t in range(steps):
        ce, probs = _batch_ce_and_probs(X, y, W, b)
        losses[t] = ce
        delta = probs
        delta[:, onehot_rows, y] -= 1.0
        delta /= n
        W -= lr[:, None, None] * (X.transpose(0, 2, 1) @ delta)
        b -= lr[:, None] * delta.sum(axis=1)
    losses[steps], _ = _batch_ce_and_probs(X, y, W, b)
    return W, b, losses


def fit_probe(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    steps: int = 10,
    lr: float | None = None,
):
    """Single-instance wrapper over fit_probe_batch; returns (W, b, losses)."""
    W, b, losses = fit_probe_batch(
        np.asarray(X, dtype=np.float64)[None], y, n_classes, steps, lr=lr
    )
    return W[0], b[0], losses[:, 0]


def probe_ce(X: np.ndarray, y: np.ndarray, W: np.ndarray, b: np.ndarray, n_classes: int):
    """Mean CE of fitted probes on held-out rows; batched or single."""
    X = np.asarray(X, dtype=np.float64)
    y = _check_labels(y, n_classes, "query")
    if X.ndim == 2:
        if X.shape[0] != y.shape[0] or X.shape[1] != W.shape[0]:
            raise ContractViolation("query features do not match probe shapes")
        return _batch_ce_and_probs(X[None], y, W[None], b[None])[0][0]
    if X.shape[1] != y.shape[0] or X.shape[2] != W.shape[1]:
        raise ContractViolation("query features do not match probe shapes")
    return _batch_ce_and_probs(X, y, W, b)[0]


def probe_reward(
    W: np.ndarray, b: np.ndarray, query_X: np.ndarray, query_y: np.ndarray, n_classes: int
) -> float:
    """Reward of a fitted probe: negative mean query CE, always <= 0."""
    return -float(probe_ce(query_X, query_y, W, b, n_classes))


def rewards_for_sets(
    sets: np.ndarray,
    support_ids: np.ndarray,
    query_ids: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    steps: int = 10,
    lr: float | None = None,
) -> np.ndarray:
    """Probe reward for each feature index set; (B, k) -> (B,).

    Rewards depend only on the set and the support/query draw, never on a
    target subject: the probe is fit on support subjects and scored on
    query subjects, and the reward is the negated query CE.
    """
    sets = np.asarray(sets, dtype=np.int64)
    if sets.ndim != 2:
        raise ContractViolation(f"sets must be (B, k), got shape {sets.shape}")
    support_ids = np.asarray(support_ids, dtype=np.int64)
    query_ids = np.asarray(query_ids, dtype=np.int64)
    if np.intersect1d(support_ids, query_ids).size:
        raise ContractViolation("support and query subject ids must be disjoint")
    order = np.sort(sets, axis=1)
    support_X = features[support_ids][:, order].transpose(1, 0, 2)
    query_X = features[query_ids][:, order].transpose(1, 0, 2)
    W, b, _ = fit_probe_batch(support_X, labels[support_ids], n_classes, steps, lr=lr)
    return -probe_ce(query_X, labels[query_ids], W, b, n_classes)


def reward_for_set(
    indices,
    support_ids: np.ndarray,
    query_ids: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    steps: int = 10,
    lr: float | None = None,
) -> float:
    """Reward of one set; bitwise equal to its row in rewards_for_sets."""
    sets = np.asarray(indices, dtype=np.int64).reshape(1, -1)
    return float(
        rewards_for_sets(
            sets, support_ids, query_ids, features, labels, n_classes, steps, lr=lr
        )[0]
    )

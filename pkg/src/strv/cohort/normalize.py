"""Feature normalization (train-split statistics only)."""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation

Z_CLAMP = 8.0
STD_FLOOR = 1e-12


def normalization_stats(features: np.ndarray, train_ids: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and population std over the training rows."""
    if len(train_ids) == 0:
        raise ContractViolation("normalization needs a non-empty train split")
    rows = np.asarray(features, dtype=np.float64)[np.asarray(train_ids)]
    return rows.mean(axis=0), rows.std(axis=0)


def apply_normalization(
    features: np.ndarray, mean: np.ndarray, std: np.ndarray, clamp: float = Z_CLAMP
) -> np.ndarray:
    """Z-score with clamping; features with std below 1e-12 map to exactly 0."""
    features = np.asarray(features, dtype=np.float64)
    live = std >= STD_FLOOR
    safe = np.where(live, std, 1.0)
    z = (features - mean) / safe
    z = np.clip(z, -clamp, clamp)
    z[..., ~live] = 0.0
    return z

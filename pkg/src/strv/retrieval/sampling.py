"""Uniform sampling of unique fixed-size feature subsets.

Each draw is a partial Fisher-Yates shuffle (first k positions of a full
index permutation), vectorized across many sets at once, then sorted
ascending. The k-prefix of a uniform permutation is a uniform ordered
arrangement, so the sorted result is uniform over all C(F, k) subsets.
Duplicate subsets are rejected and redrawn until the requested count of
distinct sets is reached; rejection is symmetric, so uniformity over the
remaining subsets is preserved.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ContractViolation


def raw_sample_sets(n_features: int, k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n sorted k-subsets, duplicates allowed; uniform over C(F, k)."""
    if not 0 < k <= n_features:
        raise ContractViolation(f"k={k} outside [1, {n_features}]")
    arr = np.tile(np.arange(n_features, dtype=np.int64), (n, 1))
    rows = np.arange(n)
    for j in range(k):
        r = rng.integers(j, n_features, size=n)
        held = arr[rows, j].copy()
        arr[rows, j] = arr[rows, r]
        arr[rows, r] = held
    return np.sort(arr[:, :k], axis=1)


def sample_sets(n_features: int, k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n unique sorted k-subsets of range(n_features); (n, k) int64.

    Deterministic per rng state. Rows keep first-draw order.
    """
    if n < 1:
        raise ContractViolation("need n >= 1 sets")
    total = math.comb(n_features, k)
    if n > total:
        raise ContractViolation(f"requested {n} unique sets but C({n_features},{k}) = {total}")
    collected = np.empty((0, k), dtype=np.int64)
    while collected.shape[0] < n:
        fresh = raw_sample_sets(n_features, k, n - collected.shape[0], rng)
        merged = np.concatenate([collected, fresh], axis=0)
        _, first_pos = np.unique(merged, axis=0, return_index=True)
        collected = merged[np.sort(first_pos)]
    return collected

"""Brute-force reward enumeration and retrieval-gap statistics.

The oracle enumerates every k-subset of a declared index subpool and
computes each subset's probe reward, giving the exact best achievable
reward. Gap statistics exploit the identity that the mean of a
non-negative sample equals the integral of its empirical tail
probability, which step-function integration reproduces exactly.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import BudgetExceededError, ContractViolation
from ..probe import rewards_for_sets

ENUMERATION_BUDGET = 10**6
_CHUNK = 2048


def enumerate_subsets(subpool: np.ndarray, k: int) -> np.ndarray:
    """All C(m, k) sorted k-subsets of the subpool, lexicographic order."""
    subpool = np.sort(np.asarray(subpool, dtype=np.int64))
    if np.unique(subpool).size != subpool.size:
        raise ContractViolation("subpool indices must be unique")
    if not 0 < k <= subpool.size:
        raise ContractViolation(f"k={k} outside [1, {subpool.size}]")
    combos = np.array(list(itertools.combinations(range(subpool.size), k)), dtype=np.int64)
    return subpool[combos]


@dataclass
class OracleResult:
    subpool: np.ndarray  # (m,) sorted indices
    k: int
    sets: np.ndarray  # (C(m,k), k)
    rewards: np.ndarray  # (C(m,k),)
    r_max: float

    def reward_of(self, indices) -> float:
        """Reward of one enumerated set (exact row lookup)."""
        key = np.sort(np.asarray(indices, dtype=np.int64))
        match = np.nonzero((self.sets == key).all(axis=1))[0]
        if match.size != 1:
            raise ContractViolation(f"set {key.tolist()} is not in the enumerated subpool")
        return float(self.rewards[match[0]])


def exhaustive_oracle(
    subpool: np.ndarray,
    k: int,
    support_ids: np.ndarray,
    query_ids: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    probe_steps: int = 10,
    budget: int = ENUMERATION_BUDGET,
) -> OracleResult:
    """Enumerate every k-subset of the subpool and its probe reward.

    Refuses (with the computed count) when C(|subpool|, k) exceeds the
    budget, so the enumeration is always honest rather than subsampled.
    """
    subpool = np.sort(np.asarray(subpool, dtype=np.int64))
    count = math.comb(subpool.size, k)
    if count > budget:
        raise BudgetExceededError(
            f"exhaustive enumeration needs C({subpool.size},{k}) = {count} rewards, "
            f"budget is {budget}"
        )
    sets = enumerate_subsets(subpool, k)
    chunks = [
        rewards_for_sets(
            sets[start : start + _CHUNK],
            support_ids,
            query_ids,
            features,
            labels,
            n_classes,
            probe_steps,
        )
        for start in range(0, sets.shape[0], _CHUNK)
    ]
    rewards = np.concatenate(chunks)
    return OracleResult(
        subpool=subpool, k=k, sets=sets, rewards=rewards, r_max=float(rewards.max())
    )


@dataclass
class GapStats:
    count: int
    mean: float
    tail_integral: float
    tail_thresholds: np.ndarray  # unique gap values, ascending
    tail_survival: np.ndarray  # P(gap > threshold) per threshold
    percentiles: dict  # {50, 90, 95, 99} -> value


def empirical_tail_integral(gaps: np.ndarray) -> float:
    """Step-function integral of the empirical tail: sum of
    (g_(i) - g_(i-1)) * P(gap >= g_(i)) over the order statistics."""
    g = np.sort(np.asarray(gaps, dtype=np.float64))
    n = g.size
    previous = 0.0
    area = 0.0
    for i in range(n):
        area += (g[i] - previous) * (n - i) / n
        previous = g[i]
    return area


def gap_statistics(gaps) -> GapStats:
    gaps = np.asarray(gaps, dtype=np.float64)
    if gaps.size == 0:
        raise ContractViolation("gap list is empty")
    if np.any(gaps < 0.0):
        raise ContractViolation("gaps must be >= 0")
    thresholds = np.unique(gaps)
    survival = np.array([(gaps > t).mean() for t in thresholds])
    return GapStats(
        count=int(gaps.size),
        mean=float(gaps.mean()),
        tail_integral=empirical_tail_integral(gaps),
        tail_thresholds=thresholds,
        tail_survival=survival,
        percentiles={p: float(np.percentile(gaps, p)) for p in (50, 90, 95, 99)},
    )


def write_gap_csv(path: str | Path, rows: list[dict]) -> None:
    """Rows: {subject_id, r_star, r_max, gap}; full f64 precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject_id", "R_star", "R_max", "gap"])
        for row in rows:
            writer.writerow(
                [row["subject_id"], repr(row["r_star"]), repr(row["r_max"]), repr(row["gap"])]
            )


def read_gap_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            {
                "subject_id": row["subject_id"],
                "r_star": float(row["R_star"]),
                "r_max": float(row["R_max"]),
                "gap": float(row["gap"]),
            }
            for row in reader
        ]

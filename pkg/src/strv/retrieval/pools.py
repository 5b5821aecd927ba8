"""Per-subject candidate pools: sample, score, keep the top M, pick top 1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation
from ..scorer import lexicographic_order, score_sets
from ..setenc import encode_sets
from .sampling import sample_sets


@dataclass
class CandidatePool:
    """Top-M candidate sets for one subject, sorted by descending score.

    Ties are broken toward the lexicographically smallest index list.
    supervised_rows index the Q members picked for reward supervision;
    their rewards are filled in by the training loop.
    """

    subject_id: object
    sets: np.ndarray  # (M, k) int64, rows sorted ascending
    scores: np.ndarray  # (M,) f64, non-increasing
    supervised_rows: np.ndarray  # (Q,) int64 indices into sets
    rewards: np.ndarray | None = None  # (Q,) f64 once computed

    @property
    def size(self) -> int:
        return self.sets.shape[0]


@dataclass
class SelectionResult:
    """The retrieved evidence set for one subject."""

    subject_id: object
    s_star: np.ndarray  # (k,) int64
    score: float
    ensemble_sets: np.ndarray  # (min(3, M), k)


def build_pool(
    subject_id,
    token_out: np.ndarray,
    context_vec: np.ndarray,
    scorer_params,
    n_features: int,
    config,
    rng: np.random.Generator,
    subpool: np.ndarray | None = None,
    candidate_sets: np.ndarray | None = None,
    score_fn=None,
) -> CandidatePool:
    """Sample P0 unique candidate sets, score them, retain the top M.

    `subpool` restricts sampling to a declared index subset (oracle
    audits). `candidate_sets` skips sampling entirely. `score_fn`
    overrides the learned scorer (oracle-as-scorer tests); it receives the
    (n, k) set array and returns (n,) scores.
    """
    if candidate_sets is not None:
        sets = np.asarray(candidate_sets, dtype=np.int64)
        if sets.ndim != 2 or sets.shape[0] == 0:
            raise ContractViolation("candidate_sets must be a non-empty (n, k) array")
        sets = np.sort(sets, axis=1)
        if np.unique(sets, axis=0).shape[0] != sets.shape[0]:
            raise ContractViolation("candidate_sets contains duplicate sets")
    elif subpool is not None:
        subpool = np.asarray(subpool, dtype=np.int64)
        if np.unique(subpool).size != subpool.size:
            raise ContractViolation("subpool indices must be unique")
        subpool = np.sort(subpool)
        if subpool[0] < 0 or subpool[-1] >= n_features:
            raise ContractViolation(f"subpool indices outside [0, {n_features})")
        positions = sample_sets(subpool.size, config.k, config.p0_size, rng)
        sets = subpool[positions]
    else:
        sets = sample_sets(n_features, config.k, config.p0_size, rng)

    sets = sets[lexicographic_order(sets)]
    if score_fn is not None:
        scores = np.asarray(score_fn(sets), dtype=np.float64)
        if scores.shape != (sets.shape[0],):
            raise ContractViolation("score_fn must return one score per set")
    else:
        embeddings = encode_sets(token_out, sets)
        scores = score_sets(context_vec, embeddings, scorer_params)

    order = np.argsort(-scores, kind="stable")
    m = min(config.pool_m, sets.shape[0])
    top = order[:m]
    q = min(config.q, m)
    supervised = np.sort(rng.choice(m, size=q, replace=False))
    return CandidatePool(
        subject_id=subject_id,
        sets=sets[top],
        scores=scores[top],
        supervised_rows=supervised.astype(np.int64),
    )


def select_top1(pool: CandidatePool) -> SelectionResult:
    """The pool's maximal-score set, plus the top-3 members for ensembling."""
    if pool.size == 0:
        raise ContractViolation("cannot select from an empty pool")
    n_ens = min(3, pool.size)
    return SelectionResult(
        subject_id=pool.subject_id,
        s_star=pool.sets[0].copy(),
        score=float(pool.scores[0]),
        ensemble_sets=pool.sets[:n_ens].copy(),
    )

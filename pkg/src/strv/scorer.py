"""Candidate-set scorer conditioned on a coarse image context.

The context is not learned: the volume is partitioned into a 4x4x4 block
grid (boundaries at i * floor(dim/4); the remainder goes to the last block)
and each block contributes its mean and its population std, means first,
stds second, giving a 128-vector. The scorer projects that to 64, fuses it
with a 64-dim set embedding through a 128 -> 128 -> 1 ReLU MLP, and emits a
scalar score per candidate set.
"""

from __future__ import annotations

import numpy as np

from . import numkit as nk
from .errors import ContractViolation

GRID = 4


def _block_bounds(dim: int) -> list[tuple[int, int]]:
    if dim < GRID:
        raise ContractViolation(f"volume dimension {dim} smaller than context grid {GRID}")
    base = dim // GRID
    edges = [i * base for i in range(GRID)] + [dim]
    return [(edges[i], edges[i + 1]) for i in range(GRID)]


def encode_context(volume: np.ndarray) -> np.ndarray:
    """(D, H, W) volume -> (128,) block means followed by block stds."""
    vol = np.asarray(volume, dtype=np.float64)
    if vol.ndim != 3:
        raise ContractViolation(f"volume must be 3-D, got shape {vol.shape}")
    means = np.empty(GRID**3)
    stds = np.empty(GRID**3)
    bounds = [_block_bounds(dim) for dim in vol.shape]
    pos = 0
    for d0, d1 in bounds[0]:
        for h0, h1 in bounds[1]:
            for w0, w1 in bounds[2]:
                block = vol[d0:d1, h0:h1, w0:w1]
                means[pos] = block.mean()
                stds[pos] = block.std()
                pos += 1
    return np.concatenate([means, stds])


def context_matrix(volumes: np.ndarray) -> np.ndarray:
    """Stack encode_context over subjects; (N, D, H, W) -> (N, 128)."""
    return np.stack([encode_context(v) for v in volumes])


def score_sets(context_vec: np.ndarray, embeddings, scorer):
    """Score each set embedding against one subject context; returns (n,).

    `scorer` may hold Tensors (training) or ndarrays (inference); the
    arithmetic is identical in both modes.
    """
    ctx = np.asarray(context_vec, dtype=np.float64).reshape(1, -1)
    n = embeddings.shape[0] if isinstance(embeddings, np.ndarray) else embeddings.data.shape[0]
    ctx_proj = nk.add_bias(nk.matmul(ctx, scorer.ctx_w), scorer.ctx_b)
    tiled = nk.matmul(np.ones((n, 1)), ctx_proj)
    fused = nk.concat([tiled, embeddings], axis=1)
    hidden = nk.relu(nk.add_bias(nk.matmul(fused, scorer.fus_w1), scorer.fus_b1))
    raw = nk.add_bias(nk.matmul(hidden, scorer.fus_w2), scorer.fus_b2)
    return nk.reshape(raw, (n,))


def score_one(context_vec: np.ndarray, embedding, scorer) -> float:
    """Scalar utility for a single set embedding."""
    emb = embedding if not isinstance(embedding, np.ndarray) else embedding.reshape(1, -1)
    if isinstance(emb, np.ndarray):
        return float(score_sets(context_vec, emb, scorer)[0])
    return score_sets(context_vec, nk.reshape(emb, (1, -1)), scorer)


def lexicographic_order(sets: np.ndarray) -> np.ndarray:
    """Row order sorting index sets lexicographically (first column primary)."""
    sets = np.asarray(sets)
    return np.lexsort(sets.T[::-1])


def rank_candidates(context_vec: np.ndarray, token_out, candidate_sets: np.ndarray, scorer):
    """Sort candidate sets by descending score; ties favor the
    lexicographically smallest index list.

    token_out is the subject's (F, 64) token-output matrix (setenc). Returns
    (ordered_sets, ordered_scores). Deterministic given parameters.
    """
    from .setenc import encode_sets

    sets = np.asarray(candidate_sets, dtype=np.int64)
    if sets.ndim != 2 or sets.shape[0] == 0:
        raise ContractViolation("rank_candidates needs a non-empty (n, k) set array")
    sets = np.sort(sets, axis=1)
    lex = lexicographic_order(sets)
    sets = sets[lex]
    embeddings = encode_sets(token_out, sets)
    scores = score_sets(context_vec, embeddings, scorer)
    if not isinstance(scores, np.ndarray):
        scores = scores.data
    order = np.argsort(-scores, kind="stable")
    return sets[order], scores[order]

"""Permutation-invariant encoder for a set of feature tokens.

A token is the concatenation of the normalized feature value (1) with three
learned metadata embeddings (8 each): ROI, feature family, and within-ROI
feature slot. Tokens pass through a shared two-layer MLP (25 -> 64 -> 64,
ReLU in between) and the set embedding is the mean of the k token outputs
taken in canonical order: ascending feature index, which coincides with
lexicographic (roi_id, family_id, feature_id) order. Canonicalizing the
summation order makes permutation invariance bitwise, not just numerical.

Throughput path: the token MLP is shared, so the outputs for all F features
of one subject are computed once (token_outputs) and every candidate set
embedding is a gathered row mean (encode_sets). The same code serves
autodiff training (Tensor parameters) and plain inference (ndarray
parameters); the kernels are identical, so both produce equal bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numkit as nk
from .errors import ContractViolation
from .radiomics import FeatureDescriptor


@dataclass(frozen=True)
class FeatureToken:
    """One selected feature: its normalized value plus metadata ids."""

    z_value: float
    roi_id: int
    family_id: int
    feature_id: int


def validate_feature_set(indices, n_features: int, k: int | None = None) -> np.ndarray:
    """Canonical (strictly increasing, duplicate-free) index array."""
    arr = np.asarray(indices, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise ContractViolation("feature set must be a non-empty 1-D index list")
    if k is not None and arr.size != k:
        raise ContractViolation(f"feature set has {arr.size} indices, expected k={k}")
    if arr.min() < 0 or arr.max() >= n_features:
        raise ContractViolation(f"feature index outside [0, {n_features})")
    if np.any(np.diff(arr) <= 0):
        raise ContractViolation("feature set indices must be strictly increasing")
    return arr


def tokenize(
    feature_vector: np.ndarray,
    feature_set,
    descriptor_table: Sequence[FeatureDescriptor],
) -> list[FeatureToken]:
    """Tokens for a feature set, in index order. Pure."""
    vec = np.asarray(feature_vector, dtype=np.float64)
    indices = validate_feature_set(feature_set, len(descriptor_table))
    if vec.shape != (len(descriptor_table),):
        raise ContractViolation(
            f"feature vector shape {vec.shape} != descriptor count {len(descriptor_table)}"
        )
    tokens = []
    for idx in indices:
        d = descriptor_table[idx]
        tokens.append(
            FeatureToken(
                z_value=float(vec[idx]),
                roi_id=d.roi_id,
                family_id=d.family_id,
                feature_id=d.feature_id,
            )
        )
    return tokens


def descriptor_id_arrays(descriptors: Sequence[FeatureDescriptor]):
    """(roi_ids, family_ids, feature_ids) as int64 arrays aligned with index."""
    for pos, d in enumerate(descriptors):
        if d.index != pos:
            raise ContractViolation(f"descriptor at position {pos} has index {d.index}")
    roi = np.array([d.roi_id for d in descriptors], dtype=np.int64)
    fam = np.array([d.family_id for d in descriptors], dtype=np.int64)
    feat = np.array([d.feature_id for d in descriptors], dtype=np.int64)
    return roi, fam, feat


def _token_mlp(values_col, roi_ids, fam_ids, feat_ids, encoder):
    tokens = nk.concat(
        [
            values_col,
            nk.gather_rows(encoder.roi_emb, roi_ids),
            nk.gather_rows(encoder.family_emb, fam_ids),
            nk.gather_rows(encoder.feature_emb, feat_ids),
        ],
        axis=1,
    )
    hidden = nk.relu(nk.add_bias(nk.matmul(tokens, encoder.w1), encoder.b1))
    return nk.add_bias(nk.matmul(hidden, encoder.w2), encoder.b2)


def token_outputs(z_row, ids, encoder):
    """Token-MLP outputs for every feature of one subject, shape (F, 64).

    `encoder` may hold Tensors (training tape) or ndarrays (inference); see
    model.raw_view. `z_row` may itself be a Tensor to differentiate through
    the feature values.
    """
    roi_ids, fam_ids, feat_ids = ids
    z_col = nk.reshape(z_row, (-1, 1)) if isinstance(z_row, nk.Tensor) else (
        np.asarray(z_row, dtype=np.float64).reshape(-1, 1)
    )
    rows = z_col.shape[0] if isinstance(z_col, np.ndarray) else z_col.data.shape[0]
    if rows != roi_ids.shape[0]:
        raise ContractViolation(
            f"feature vector length {rows} != descriptor count {roi_ids.shape[0]}"
        )
    return _token_mlp(z_col, roi_ids, fam_ids, feat_ids, encoder)


def encode_sets(outputs, sets: np.ndarray):
    """Mean-pool token outputs over each index set; (n, k) -> (n, 64).

    Rows are canonicalized by ascending sort, so any permutation of the
    same indices produces a bitwise-identical embedding.
    """
    sets = np.asarray(sets, dtype=np.int64)
    if sets.ndim != 2:
        raise ContractViolation(f"sets must be 2-D, got shape {sets.shape}")
    n, k = sets.shape
    order = np.sort(sets, axis=1)
    flat = nk.gather_rows(outputs, order.reshape(-1))
    width = flat.shape[1] if isinstance(flat, np.ndarray) else flat.data.shape[1]
    return nk.mean(nk.reshape(flat, (n, k, width)), axis=1)


def encode_set(tokens: Sequence[FeatureToken], encoder, expected_k: int | None = None):
    """Set embedding from an explicit token list; returns (64,).

    Tokens are sorted by (roi_id, family_id, feature_id) before pooling, so
    the result is invariant to the order they arrive in. Each token row runs
    the MLP independently, so duplicate tokens produce identical rows bit
    for bit and their mean collapses exactly (for power-of-two counts).
    """
    if len(tokens) == 0:
        raise ContractViolation("encode_set needs at least one token")
    if expected_k is not None and len(tokens) != expected_k:
        raise ContractViolation(f"got {len(tokens)} tokens, expected k={expected_k}")
    ordered = sorted(tokens, key=lambda t: (t.roi_id, t.family_id, t.feature_id))
    rows = [
        _token_mlp(
            np.array([[t.z_value]]),
            np.array([t.roi_id], dtype=np.int64),
            np.array([t.family_id], dtype=np.int64),
            np.array([t.feature_id], dtype=np.int64),
            encoder,
        )
        for t in ordered
    ]
    return nk.mean(nk.concat(rows, axis=0), axis=0)


def encode_indices(z_row: np.ndarray, ids, encoder, indices) -> np.ndarray:
    """Single-set convenience over the throughput path; returns (64,)."""
    outputs = token_outputs(z_row, ids, encoder)
    sets = np.asarray(indices, dtype=np.int64).reshape(1, -1)
    return encode_sets(outputs, sets)[0]

"""Stratified splits and support/query draws."""

from __future__ import annotations

import numpy as np

from ..errors import StratificationError


def _quotas(counts: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder allocation of `total` over classes, each >= 1."""
    n_classes = len(counts)
    if total < n_classes:
        raise StratificationError(f"cannot place {total} draws over {n_classes} classes")
    fractions = counts / counts.sum() * total
    base = np.floor(fractions).astype(np.int64)
    base = np.maximum(base, 1)
    while base.sum() > total:
        candidates = np.where(base > 1)[0]
        worst = candidates[np.argmin((fractions - base)[candidates])]
        base[worst] -= 1
    if base.sum() < total:
        order = np.argsort(-(fractions - base), kind="stable")
        for idx in order:
            if base.sum() == total:
                break
            base[idx] += 1
    return base


def stratified_split(
    labels: np.ndarray, train_fraction: float = 0.8, seed: int = 0
) -> dict[str, list[int]]:
    """Class-stratified train/validation split with at least one subject of
    every class on each side."""
    labels = np.asarray(labels)
    classes = np.unique(labels)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 303]))
    train: list[int] = []
    val: list[int] = []
    for c in classes:
        members = np.where(labels == c)[0]
        if len(members) < 2:
            raise StratificationError(f"class {c} has {len(members)} subject(s), need >= 2")
        members = members[rng.permutation(len(members))]
        n_train = int(round(train_fraction * len(members)))
        n_train = min(max(n_train, 1), len(members) - 1)
        train.extend(int(i) for i in members[:n_train])
        val.extend(int(i) for i in members[n_train:])
    return {"train": sorted(train), "val": sorted(val)}


def draw_support_query(
    train_ids: list[int],
    labels: np.ndarray,
    n_support: int,
    n_query: int,
    rng: np.random.Generator,
) -> tuple[list[int], list[int]]:
    """Disjoint class-stratified support and query draws from the train split."""
    labels = np.asarray(labels)
    train_ids = np.asarray(train_ids)
    if n_support + n_query > len(train_ids):
        raise StratificationError(
            f"support {n_support} + query {n_query} exceeds train size {len(train_ids)}"
        )
    classes = np.unique(labels[train_ids])
    counts = np.array([(labels[train_ids] == c).sum() for c in classes])
    sup_quota = _quotas(counts, n_support)
    qry_quota = _quotas(counts, n_query)
    if np.any(sup_quota + qry_quota > counts):
        raise StratificationError("a class is too small for disjoint support/query draws")

    support: list[int] = []
    query: list[int] = []
    for c, sq, qq in zip(classes, sup_quota, qry_quota):
        members = train_ids[labels[train_ids] == c]
        members = members[rng.permutation(len(members))]
        support.extend(int(i) for i in members[:sq])
        query.extend(int(i) for i in members[sq : sq + qq])
    return sorted(support), sorted(query)

"""Gray-level co-occurrence, run-length and dependence features.

Conventions shared by the three families:

* 13 direction offsets at distance 1, one representative per +- pair of the
  26-neighborhood (first nonzero component positive).
* Labels are 1-based from `discretize`; label 0 marks voxels outside the
  region and never enters a matrix.
* Co-occurrence matrices are symmetrized and normalized per direction and
  the six features are averaged over directions that produced at least one
  pair. Run-length matrices are summed over directions before features.
  Dependence counts use the full 26-neighborhood with equal labels.
* Regions with no valid pairs in any direction are degenerate texture and
  take flat-region values (energy/correlation/homogeneity 1, the rest 0).
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptyRoiError

DIRECTIONS: tuple[tuple[int, int, int], ...] = tuple(
    (dz, dy, dx)
    for dz in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dx in (-1, 0, 1)
    if (dz, dy, dx) != (0, 0, 0)
    and (dz > 0 or (dz == 0 and dy > 0) or (dz == 0 and dy == 0 and dx > 0))
)

GLCM_NAMES = (
    "JointEnergy",
    "Contrast",
    "Correlation",
    "InverseDifferenceMoment",
    "JointEntropy",
    "Dissimilarity",
)
GLRLM_NAMES = (
    "GrayLevelVariance",
    "ShortRunEmphasis",
    "LongRunEmphasis",
    "RunLengthNonUniformity",
)
GLDM_NAMES = (
    "DependenceNonUniformity",
    "SmallDependenceEmphasis",
    "LargeDependenceEmphasis",
)

_GLCM_FLAT = {
    "JointEnergy": 1.0,
    "Contrast": 0.0,
    "Correlation": 1.0,
    "InverseDifferenceMoment": 1.0,
    "JointEntropy": 0.0,
    "Dissimilarity": 0.0,
}


def _pair_slices(shape, offset):
    """Slice pair (src, dst) so that arr[src] aligns with arr at +offset."""
    src, dst = [], []
    for dim, d in zip(shape, offset):
        if d >= 0:
            src.append(slice(0, dim - d))
            dst.append(slice(d, dim))
        else:
            src.append(slice(-d, dim))
            dst.append(slice(0, dim + d))
    return tuple(src), tuple(dst)


def _check_region(labels, mask):
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyRoiError("texture features: mask selects no voxels")
    return np.asarray(labels, dtype=np.int64), mask


def glcm_features(labels: np.ndarray, mask: np.ndarray, n_levels: int = 32) -> dict[str, float]:
    """Six co-occurrence features averaged over directions with pairs."""
    labels, mask = _check_region(labels, mask)
    shape = labels.shape
    level_values = np.arange(1, n_levels + 1, dtype=np.float64)
    iv = level_values[:, None]
    jv = level_values[None, :]
    sums = dict.fromkeys(GLCM_NAMES, 0.0)
    used = 0
    for offset in DIRECTIONS:
        src, dst = _pair_slices(shape, offset)
        ok = mask[src] & mask[dst]
        if not ok.any():
            continue
        i = labels[src][ok] - 1
        j = labels[dst][ok] - 1
        m = np.bincount(i * n_levels + j, minlength=n_levels * n_levels).astype(np.float64)
        m = m.reshape(n_levels, n_levels)
        m = m + m.T
        p = m / m.sum()

        sums["JointEnergy"] += float((p * p).sum())
        sums["Contrast"] += float(((iv - jv) ** 2 * p).sum())
        sums["InverseDifferenceMoment"] += float((p / (1.0 + (iv - jv) ** 2)).sum())
        nz = p[p > 0]
        sums["JointEntropy"] += float(-(nz * np.log2(nz)).sum())
        sums["Dissimilarity"] += float((np.abs(iv - jv) * p).sum())
        px = p.sum(axis=1)
        py = p.sum(axis=0)
        mu_x = float((level_values * px).sum())
        mu_y = float((level_values * py).sum())
        var_x = float(((level_values - mu_x) ** 2 * px).sum())
        var_y = float(((level_values - mu_y) ** 2 * py).sum())
        if var_x <= 0.0 or var_y <= 0.0:
            sums["Correlation"] += 1.0
        else:
            cov = float(((iv - mu_x) * (jv - mu_y) * p).sum())
            sums["Correlation"] += cov / np.sqrt(var_x * var_y)
        used += 1

    if used == 0:
        return dict(_GLCM_FLAT)
    return {name: sums[name] / used for name in GLCM_NAMES}


def _run_lengths(labels, mask, offset):
    """(gray, length) arrays for maximal runs along one direction."""
    shape = labels.shape
    src, dst = _pair_slices(shape, offset)
    cont = np.zeros(shape, dtype=bool)
    cont[src] = mask[src] & mask[dst] & (labels[src] == labels[dst])

    # length of the equal-label chain starting at each voxel, by fixpoint
    length = mask.astype(np.int64)
    base = length.copy()
    while True:
        ahead = np.zeros(shape, dtype=np.int64)
        ahead[src] = length[dst]
        updated = np.where(cont, 1 + ahead, base)
        if np.array_equal(updated, length):
            break
        length = updated

    entered = np.zeros(shape, dtype=bool)
    entered[dst] = cont[src]  # voxel is the continuation of a run
    start = mask & ~entered
    return labels[start] - 1, length[start]


def glrlm_features(labels: np.ndarray, mask: np.ndarray, n_levels: int = 32) -> dict[str, float]:
    """Four run-length features from the direction-summed matrix."""
    labels, mask = _check_region(labels, mask)
    max_len = max(labels.shape)
    matrix = np.zeros((n_levels, max_len), dtype=np.float64)
    for offset in DIRECTIONS:
        g, run = _run_lengths(labels, mask, offset)
        np.add.at(matrix, (g, run - 1), 1.0)

    n_r = matrix.sum()
    p = matrix / n_r
    level_values = np.arange(1, n_levels + 1, dtype=np.float64)
    lengths = np.arange(1, max_len + 1, dtype=np.float64)
    p_gray = p.sum(axis=1)
    mu = float((level_values * p_gray).sum())
    return {
        "GrayLevelVariance": float((((level_values - mu) ** 2) * p_gray).sum()),
        "ShortRunEmphasis": float((p / lengths**2).sum()),
        "LongRunEmphasis": float((p * lengths**2).sum()),
        "RunLengthNonUniformity": float((matrix.sum(axis=0) ** 2).sum() / n_r),
    }


def gldm_features(
    labels: np.ndarray, mask: np.ndarray, n_levels: int = 32, alpha: int = 0
) -> dict[str, float]:
    """Three dependence features; a neighbor counts when |label diff| <= alpha."""
    labels, mask = _check_region(labels, mask)
    shape = labels.shape
    dependence = np.zeros(shape, dtype=np.int64)
    for offset in DIRECTIONS:
        src, dst = _pair_slices(shape, offset)
        close = mask[src] & mask[dst] & (np.abs(labels[src] - labels[dst]) <= alpha)
        dependence[src] += close
        dependence[dst] += close

    n_v = int(mask.sum())
    max_col = 27  # dependence 0..26 maps to columns 1..27
    table = np.zeros((n_levels, max_col), dtype=np.float64)
    np.add.at(table, (labels[mask] - 1, dependence[mask]), 1.0)

    cols = np.arange(1, max_col + 1, dtype=np.float64)
    return {
        "DependenceNonUniformity": float((table.sum(axis=0) ** 2).sum() / n_v),
        "SmallDependenceEmphasis": float((table / cols**2).sum() / n_v),
        "LargeDependenceEmphasis": float((table * cols**2).sum() / n_v),
    }

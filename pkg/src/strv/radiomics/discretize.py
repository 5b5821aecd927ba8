"""Gray-level discretization."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyRoiError


def discretize(volume: np.ndarray, mask: np.ndarray, bin_count: int = 32) -> np.ndarray:
    """Uniform min-max binning of masked intensities into labels 1..bin_count.

    The top edge closes the last bin (the maximum maps to bin_count, not
    bin_count + 1). A constant region maps to label 1 everywhere. Voxels
    outside the mask get label 0.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyRoiError("discretize: mask selects no voxels")
    vals = np.asarray(volume, dtype=np.float64)[mask]
    lo = vals.min()
    hi = vals.max()
    labels = np.zeros(volume.shape, dtype=np.int64)
    if hi == lo:
        labels[mask] = 1
        return labels
    bins = np.floor((vals - lo) / (hi - lo) * bin_count).astype(np.int64)
    np.clip(bins, 0, bin_count - 1, out=bins)
    labels[mask] = bins + 1
    return labels

"""First-order intensity statistics over a masked region.

All moments are population moments (divide by n). Degenerate regions
(constant intensity) take the conventional values Skewness 0 and
Kurtosis 3, and their histogram entropy is 0.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptyRoiError

FIRST_ORDER_NAMES = (
    "Mean",
    "Median",
    "Minimum",
    "Maximum",
    "Range",
    "Energy",
    "Entropy",
    "Variance",
    "Skewness",
    "Kurtosis",
)


def first_order_features(
    volume: np.ndarray, mask: np.ndarray, bin_count: int = 32
) -> dict[str, float]:
    """The ten first-order features, keyed by name.

    Entropy uses the same uniform min-max binning as label discretization
    (bin_count bins over [min, max]). Kurtosis is the plain fourth
    standardized moment, i.e. Fisher excess plus 3.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyRoiError("first_order_features: mask selects no voxels")
    vals = np.asarray(volume, dtype=np.float64)[mask]
    n = vals.size
    mean = vals.mean()
    vmin = float(vals.min())
    vmax = float(vals.max())
    energy = float((vals * vals).sum())
    centered = vals - mean
    m2 = float((centered**2).mean())

    if vmax == vmin:
        entropy = 0.0
        skewness = 0.0
        kurtosis = 3.0
    else:
        bins = np.floor((vals - vmin) / (vmax - vmin) * bin_count).astype(np.int64)
        np.clip(bins, 0, bin_count - 1, out=bins)
        counts = np.bincount(bins, minlength=bin_count)
        p = counts[counts > 0] / n
        entropy = float(-(p * np.log2(p)).sum())
        m3 = float((centered**3).mean())
        m4 = float((centered**4).mean())
        skewness = m3 / m2**1.5
        kurtosis = m4 / m2**2

    return {
        "Mean": float(mean),
        "Median": float(np.median(vals)),
        "Minimum": vmin,
        "Maximum": vmax,
        "Range": vmax - vmin,
        "Energy": energy,
        "Entropy": entropy,
        "Variance": m2,
        "Skewness": skewness,
        "Kurtosis": kurtosis,
    }

"""Region-of-interest grids.

A centered crop covers 50% of depth, 30% of height and 50% of width; the
crop is split 2x2x2 into eight disjoint cells. The whole crop is kept as a
ninth region so every subject exposes one coarse region plus eight local
ones.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation

CROP_FRACTIONS = (0.5, 0.3, 0.5)


def centered_crop_bounds(volume_dims: tuple[int, int, int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Start indices and extents of the centered crop.

    Extents are floor(dim * fraction) rounded down to even so the 2x2x2
    split lands on integer boundaries; starts are floor(center - extent/2).
    """
    if len(volume_dims) != 3:
        raise ContractViolation("expected 3-D volume dims")
    extents = []
    starts = []
    for dim, frac in zip(volume_dims, CROP_FRACTIONS):
        e = int(np.floor(dim * frac))
        e -= e % 2
        if e < 2:
            raise ContractViolation(f"dimension {dim} too small for a {frac:.0%} crop")
        extents.append(e)
        starts.append((dim - e) // 2)
    return tuple(starts), tuple(extents)


def grid_rois(volume_dims: tuple[int, int, int]) -> dict[str, np.ndarray]:
    """Boolean masks for the crop and its eight octant cells.

    Returns an ordered dict: "crop" first, then "g{d}{h}{w}" for the octant
    with bit d/h/w along each axis. The eight cells tile the crop exactly
    and are pairwise disjoint.
    """
    starts, extents = centered_crop_bounds(volume_dims)
    halves = tuple(e // 2 for e in extents)
    rois: dict[str, np.ndarray] = {}

    crop = np.zeros(volume_dims, dtype=bool)
    crop[
        starts[0] : starts[0] + extents[0],
        starts[1] : starts[1] + extents[1],
        starts[2] : starts[2] + extents[2],
    ] = True
    rois["crop"] = crop

    for bd in (0, 1):
        for bh in (0, 1):
            for bw in (0, 1):
                cell = np.zeros(volume_dims, dtype=bool)
                z0 = starts[0] + bd * halves[0]
                y0 = starts[1] + bh * halves[1]
                x0 = starts[2] + bw * halves[2]
                cell[z0 : z0 + halves[0], y0 : y0 + halves[1], x0 : x0 + halves[2]] = True
                rois[f"g{bd}{bh}{bw}"] = cell
    return rois

"""Per-region and per-subject feature extraction.

The roster is fixed: 10 first-order + 6 co-occurrence + 4 run-length +
3 dependence features per region, in the order below. A subject's feature
vector concatenates the rosters of its regions in region order, so with
9 regions the vector has 207 entries.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..errors import ContractViolation, EmptyRoiError
from .discretize import discretize
from .firstorder import FIRST_ORDER_NAMES, first_order_features
from .texture import GLCM_NAMES, GLDM_NAMES, GLRLM_NAMES, gldm_features, glcm_features, glrlm_features

FAMILY_NAMES = ("firstorder", "glcm", "glrlm", "gldm")

ROSTER: tuple[tuple[str, str], ...] = tuple(
    [("firstorder", n) for n in FIRST_ORDER_NAMES]
    + [("glcm", n) for n in GLCM_NAMES]
    + [("glrlm", n) for n in GLRLM_NAMES]
    + [("gldm", n) for n in GLDM_NAMES]
)

FEATURES_PER_ROI = len(ROSTER)  # 23


@dataclass(frozen=True)
class FeatureDescriptor:
    """Identity of one pool entry: global index plus region/family/name ids."""

    index: int
    roi: str
    roi_id: int
    family: str
    family_id: int
    name: str
    feature_id: int  # offset within the region's roster, 0..22


def build_descriptors(roi_names: list[str]) -> list[FeatureDescriptor]:
    out = []
    for roi_id, roi in enumerate(roi_names):
        for offset, (family, name) in enumerate(ROSTER):
            out.append(
                FeatureDescriptor(
                    index=roi_id * FEATURES_PER_ROI + offset,
                    roi=roi,
                    roi_id=roi_id,
                    family=family,
                    family_id=FAMILY_NAMES.index(family),
                    name=name,
                    feature_id=offset,
                )
            )
    return out


def _bounding_box(mask: np.ndarray):
    coords = np.nonzero(mask)
    return tuple(slice(int(c.min()), int(c.max()) + 1) for c in coords)


def extract_roi(volume: np.ndarray, mask: np.ndarray, bin_count: int = 32) -> np.ndarray:
    """The 23 roster features of one region, in roster order."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyRoiError("extract_roi: mask selects no voxels")
    box = _bounding_box(mask)
    vol = np.asarray(volume, dtype=np.float64)[box]
    sub = mask[box]

    values = dict(first_order_features(vol, sub, bin_count))
    labels = discretize(vol, sub, bin_count)
    values.update(glcm_features(labels, sub, bin_count))
    values.update(glrlm_features(labels, sub, bin_count))
    values.update(gldm_features(labels, sub, bin_count))
    return np.array([values[name] for _, name in ROSTER], dtype=np.float64)


def extract_subject(
    volume: np.ndarray, rois: dict[str, np.ndarray], bin_count: int = 32
) -> np.ndarray:
    """Concatenated roster features over the subject's regions, region order."""
    if volume.ndim != 3:
        raise ContractViolation("extract_subject expects a 3-D volume")
    parts = [extract_roi(volume, mask, bin_count) for mask in rois.values()]
    return np.concatenate(parts)


def export_feature_csv(
    path: str | Path, values: np.ndarray, descriptors: list[FeatureDescriptor]
) -> None:
    """One row per feature: index,roi,family,name,value (full f64 precision)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (len(descriptors),):
        raise ContractViolation(
            f"feature vector length {values.shape} does not match {len(descriptors)} descriptors"
        )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "roi", "family", "name", "value"])
        for d, v in zip(descriptors, values):
            writer.writerow([d.index, d.roi, d.family, d.name, repr(float(v))])


def export_descriptors_json(path: str | Path, descriptors: list[FeatureDescriptor]) -> None:
    Path(path).write_text(json.dumps([asdict(d) for d in descriptors], indent=1))


def load_descriptors_json(path: str | Path) -> list[FeatureDescriptor]:
    rows = json.loads(Path(path).read_text())
    return [FeatureDescriptor(**row) for row in rows]

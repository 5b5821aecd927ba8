"""Radiomic feature extraction: discretization, first-order, texture, regions."""

from .discretize import discretize
from .firstorder import FIRST_ORDER_NAMES, first_order_features
from .texture import (
    DIRECTIONS,
    GLCM_NAMES,
    GLDM_NAMES,
    GLRLM_NAMES,
    gldm_features,
    glcm_features,
    glrlm_features,
)
from .rois import centered_crop_bounds, grid_rois
from .extract import (
    FAMILY_NAMES,
    FEATURES_PER_ROI,
    ROSTER,
    FeatureDescriptor,
    build_descriptors,
    export_descriptors_json,
    export_feature_csv,
    extract_roi,
    extract_subject,
    load_descriptors_json,
)

__all__ = [
    "discretize",
    "FIRST_ORDER_NAMES",
    "first_order_features",
    "DIRECTIONS",
    "GLCM_NAMES",
    "GLDM_NAMES",
    "GLRLM_NAMES",
    "gldm_features",
    "glcm_features",
    "glrlm_features",
    "centered_crop_bounds",
    "grid_rois",
    "FAMILY_NAMES",
    "FEATURES_PER_ROI",
    "ROSTER",
    "FeatureDescriptor",
    "build_descriptors",
    "export_descriptors_json",
    "export_feature_csv",
    "extract_roi",
    "extract_subject",
    "load_descriptors_json",
]

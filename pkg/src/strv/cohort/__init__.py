"""Synthetic cohorts: generation, persistence, splits, normalization."""

from .storage import (
    Cohort,
    load_cohort,
    load_mask,
    load_volume,
    save_cohort,
    save_mask,
    save_volume,
)
from .synthesize import (
    EFFECTS,
    PlantEffect,
    cohort_descriptors,
    default_plant_spec,
    extract_features,
    generate_clone_cohort,
    generate_cohort,
)
from .split import draw_support_query, stratified_split
from .normalize import Z_CLAMP, apply_normalization, normalization_stats

__all__ = [
    "Cohort",
    "load_cohort",
    "load_mask",
    "load_volume",
    "save_cohort",
    "save_mask",
    "save_volume",
    "EFFECTS",
    "PlantEffect",
    "cohort_descriptors",
    "default_plant_spec",
    "extract_features",
    "generate_clone_cohort",
    "generate_cohort",
    "draw_support_query",
    "stratified_split",
    "Z_CLAMP",
    "apply_normalization",
    "normalization_stats",
]

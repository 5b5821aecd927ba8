"""Synthetic cohorts with planted class signal.

Volumes are smooth seeded noise (unit variance), and each class optionally
carries localized effects inside named regions:

* intensity_shift: adds `magnitude` inside the region (so magnitude is in
  units of the background standard deviation);
* noise_boost: adds white noise with std `magnitude` inside the region;
* checker_texture: adds a +-`magnitude` parity checkerboard inside.

A second constructor builds a feature-space cohort directly (no volumes
worth reading): one informative feature duplicated as near-identical
clones, one complementary feature that only helps jointly, and pure-noise
fillers. It exists to probe redundancy handling at small k.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from ..errors import ContractViolation
from ..radiomics import FEATURES_PER_ROI, build_descriptors, extract_subject, grid_rois
from .storage import Cohort

EFFECTS = ("intensity_shift", "noise_boost", "checker_texture")


@dataclass(frozen=True)
class PlantEffect:
    """One planted class effect: which class, which region, what and how much."""

    target_class: int
    roi: str
    effect: str
    magnitude: float

    def __post_init__(self):
        if self.effect not in EFFECTS:
            raise ContractViolation(f"unknown effect {self.effect!r}, expected one of {EFFECTS}")


def default_plant_spec(n_classes: int) -> list[PlantEffect]:
    """A deterministic demo plant layout: class 0 is unmodified background,
    later classes get progressively different region effects."""
    plants = []
    if n_classes >= 2:
        plants += [
            PlantEffect(1, "g000", "intensity_shift", 2.0),
            PlantEffect(1, "g011", "noise_boost", 1.5),
        ]
    if n_classes >= 3:
        plants += [
            PlantEffect(2, "g111", "checker_texture", 1.5),
            PlantEffect(2, "g100", "intensity_shift", -2.0),
        ]
    for c in range(3, n_classes):
        plants.append(PlantEffect(c, "g001", "intensity_shift", 1.0 + 0.75 * c))
    return plants


def _smooth_field(rng: np.random.Generator, dims, sigma: float = 2.0) -> np.ndarray:
    field = gaussian_filter(rng.normal(size=dims), sigma=sigma, mode="reflect")
    field -= field.mean()
    sd = field.std()
    if sd > 0:
        field /= sd
    return field


def _checker(dims) -> np.ndarray:
    z, y, x = np.indices(dims)
    return np.where((z + y + x) % 2 == 0, 1.0, -1.0)


def generate_cohort(
    n_subjects: int,
    dims: tuple[int, int, int],
    n_classes: int,
    plant_spec: list[PlantEffect] | None = None,
    seed: int = 0,
) -> Cohort:
    """Build a cohort of smooth-noise volumes with per-class planted effects.

    Labels are balanced up to remainder and shuffled deterministically by
    the seed. Region masks come from the shared grid for `dims`.
    """
    if n_subjects < 2 * n_classes:
        raise ContractViolation("need at least two subjects per class")
    if plant_spec is None:
        plant_spec = default_plant_spec(n_classes)
    masks = grid_rois(dims)
    for plant in plant_spec:
        if plant.roi not in masks:
            raise ContractViolation(f"plant names unknown region {plant.roi!r}")
        if not 0 <= plant.target_class < n_classes:
            raise ContractViolation(f"plant targets class {plant.target_class} of {n_classes}")

    rng = np.random.default_rng(np.random.SeedSequence([seed, 101]))
    labels = np.arange(n_subjects, dtype=np.int64) % n_classes
    rng.shuffle(labels)

    checker = _checker(dims)
    volumes = np.zeros((n_subjects, *dims), dtype=np.float32)
    for i in range(n_subjects):
        vol = _smooth_field(rng, dims)
        for plant in plant_spec:
            if plant.target_class != labels[i]:
                continue
            region = masks[plant.roi]
            if plant.effect == "intensity_shift":
                vol[region] += plant.magnitude
            elif plant.effect == "noise_boost":
                vol[region] += rng.normal(0.0, abs(plant.magnitude), size=int(region.sum()))
            else:
                vol[region] += plant.magnitude * checker[region]
        volumes[i] = vol.astype(np.float32)

    return Cohort(
        n_classes=n_classes,
        dims=tuple(dims),
        roi_names=list(masks),
        subject_ids=[f"s{i:04d}" for i in range(n_subjects)],
        labels=labels,
        volumes=volumes,
        masks=masks,
        seed=seed,
        plant_spec=[asdict(p) for p in plant_spec],
    )


def extract_features(cohort: Cohort, bin_count: int = 32) -> np.ndarray:
    """Extract the full feature matrix (N, F) and attach it to the cohort."""
    rows = [
        extract_subject(cohort.volumes[i], cohort.masks, bin_count)
        for i in range(cohort.n_subjects)
    ]
    cohort.features = np.stack(rows)
    return cohort.features


def cohort_descriptors(cohort: Cohort):
    return build_descriptors(cohort.roi_names)


def generate_clone_cohort(
    n_subjects: int = 100,
    seed: int = 0,
    n_clones: int = 10,
    signal: float = 1.0,
    shared_noise: float = 1.5,
    clone_jitter: float = 0.05,
    residual_noise: float = 0.05,
    complement_signal: float = 0.0,
    dims: tuple[int, int, int] = (8, 16, 16),
) -> Cohort:
    """Two-class cohort built directly in feature space (F = 23, one region).

    Feature layout: indices [0, n_clones) are near-identical clones of one
    informative feature u = signal*(2y-1) + shared noise; index n_clones is
    the complementary feature v = complement_signal*(2y-1) - shared noise +
    tiny residual (weak alone, cancels u's noise jointly); the rest is
    standard normal filler. Volumes are uninformative smooth noise so the
    image context carries no class signal.
    """
    if n_clones + 1 >= FEATURES_PER_ROI:
        raise ContractViolation("clone layout must leave room for noise features")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 202]))
    labels = np.arange(n_subjects, dtype=np.int64) % 2
    rng.shuffle(labels)

    sign = 2.0 * labels - 1.0
    shared = rng.normal(0.0, shared_noise, size=n_subjects)
    u = signal * sign + shared
    features = np.zeros((n_subjects, FEATURES_PER_ROI))
    for j in range(n_clones):
        features[:, j] = u + rng.normal(0.0, clone_jitter, size=n_subjects)
    features[:, n_clones] = (
        complement_signal * sign
        - shared
        + rng.normal(0.0, residual_noise, size=n_subjects)
    )
    n_noise = FEATURES_PER_ROI - n_clones - 1
    features[:, n_clones + 1 :] = rng.normal(size=(n_subjects, n_noise))

    masks = grid_rois(dims)
    crop_only = {"crop": masks["crop"]}
    volumes = np.stack(
        [_smooth_field(rng, dims).astype(np.float32) for _ in range(n_subjects)]
    )
    return Cohort(
        n_classes=2,
        dims=tuple(dims),
        roi_names=["crop"],
        subject_ids=[f"s{i:04d}" for i in range(n_subjects)],
        labels=labels,
        volumes=volumes,
        masks=crop_only,
        seed=seed,
        plant_spec=[{"synthetic": "clone", "n_clones": n_clones}],
        features=features,
    )

"""Cohort persistence.

Volume files (all integers little-endian):

    magic   7 bytes  b"STRVVOL"
    version u32      currently 1
    dims    3 x u32  depth, height, width
    payload dims voxels, f32 little-endian, C order

Mask files share the layout with a u8 payload (0/1). The manifest is JSON
and references volumes and masks by relative path; features live in a
sibling .npy file once extracted.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import FormatError, UnsupportedVersion

VOLUME_MAGIC = b"STRVVOL"
VOLUME_VERSION = 1


def save_volume(path: str | Path, volume: np.ndarray) -> None:
    volume = np.asarray(volume, dtype="<f4")
    if volume.ndim != 3:
        raise FormatError("volumes are 3-D")
    header = VOLUME_MAGIC + struct.pack("<IIII", VOLUME_VERSION, *volume.shape)
    Path(path).write_bytes(header + volume.tobytes(order="C"))


def save_mask(path: str | Path, mask: np.ndarray) -> None:
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 3:
        raise FormatError("masks are 3-D")
    header = VOLUME_MAGIC + struct.pack("<IIII", VOLUME_VERSION, *mask.shape)
    Path(path).write_bytes(header + mask.astype("u1").tobytes(order="C"))


def _read_header(path: str | Path) -> tuple[bytes, tuple[int, int, int], bytes]:
    raw = Path(path).read_bytes()
    if len(raw) < 23:
        raise FormatError(f"{path}: truncated header")
    if raw[:7] != VOLUME_MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:7]!r}")
    version, d, h, w = struct.unpack_from("<IIII", raw, 7)
    if version > VOLUME_VERSION:
        raise UnsupportedVersion(f"{path}: version {version} > {VOLUME_VERSION}")
    return raw, (d, h, w), raw[23:]


def load_volume(path: str | Path) -> np.ndarray:
    _, dims, payload = _read_header(path)
    expected = 4 * dims[0] * dims[1] * dims[2]
    if len(payload) != expected:
        raise FormatError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype="<f4").reshape(dims).astype(np.float32)


def load_mask(path: str | Path) -> np.ndarray:
    _, dims, payload = _read_header(path)
    expected = dims[0] * dims[1] * dims[2]
    if len(payload) != expected:
        raise FormatError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype="u1").reshape(dims).astype(bool)


@dataclass
class Cohort:
    """In-memory cohort: volumes, masks, labels and (optionally) features."""

    n_classes: int
    dims: tuple[int, int, int]
    roi_names: list[str]
    subject_ids: list[str]
    labels: np.ndarray  # (N,) int64
    volumes: np.ndarray  # (N, D, H, W) float32
    masks: dict[str, np.ndarray]  # roi name -> (D, H, W) bool, shared by subjects
    seed: int
    plant_spec: list[dict] = field(default_factory=list)
    features: np.ndarray | None = None  # (N, F) float64 once extracted
    splits: dict[str, list[int]] | None = None
    normalization: dict[str, list[float]] | None = None

    @property
    def n_subjects(self) -> int:
        return len(self.subject_ids)

    @property
    def n_features(self) -> int:
        return len(self.roi_names) * 23


def save_cohort(cohort: Cohort, out_dir: str | Path) -> None:
    """Write manifest + volumes + masks (+ features when present)."""
    out = Path(out_dir)
    (out / "volumes").mkdir(parents=True, exist_ok=True)
    (out / "masks").mkdir(parents=True, exist_ok=True)

    subjects = []
    for i, sid in enumerate(cohort.subject_ids):
        rel = f"volumes/{sid}.vol"
        save_volume(out / rel, cohort.volumes[i])
        subjects.append({"id": sid, "label": int(cohort.labels[i]), "volume": rel})

    mask_paths = {}
    for name, mask in cohort.masks.items():
        rel = f"masks/{name}.msk"
        save_mask(out / rel, mask)
        mask_paths[name] = rel

    manifest = {
        "version": 1,
        "n_classes": cohort.n_classes,
        "dims": list(cohort.dims),
        "roi_names": cohort.roi_names,
        "n_features": cohort.n_features,
        "seed": cohort.seed,
        "plant_spec": cohort.plant_spec,
        "subjects": subjects,
        "masks": mask_paths,
        "splits": cohort.splits,
        "normalization": cohort.normalization,
        "features_file": "features.npy" if cohort.features is not None else None,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    if cohort.features is not None:
        np.save(out / "features.npy", cohort.features)


def load_cohort(cohort_dir: str | Path) -> Cohort:
    root = Path(cohort_dir)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise FormatError(f"no manifest.json under {root}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    if manifest.get("version", 0) > 1:
        raise UnsupportedVersion(f"{manifest_path}: manifest version {manifest['version']}")

    dims = tuple(manifest["dims"])
    subject_ids = [s["id"] for s in manifest["subjects"]]
    labels = np.array([s["label"] for s in manifest["subjects"]], dtype=np.int64)
    volumes = np.zeros((len(subject_ids), *dims), dtype=np.float32)
    for i, s in enumerate(manifest["subjects"]):
        vol = load_volume(root / s["volume"])
        if vol.shape != dims:
            raise FormatError(f"{s['volume']}: dims {vol.shape} disagree with manifest {dims}")
        volumes[i] = vol
    masks = {name: load_mask(root / rel) for name, rel in manifest["masks"].items()}

    features = None
    if manifest.get("features_file"):
        features = np.load(root / manifest["features_file"])

    return Cohort(
        n_classes=manifest["n_classes"],
        dims=dims,
        roi_names=list(manifest["roi_names"]),
        subject_ids=subject_ids,
        labels=labels,
        volumes=volumes,
        masks=masks,
        seed=manifest["seed"],
        plant_spec=manifest.get("plant_spec", []),
        features=features,
        splits=manifest.get("splits"),
        normalization=manifest.get("normalization"),
    )

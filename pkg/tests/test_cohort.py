from __future__ import annotations

import numpy as np
import pytest

from strv import cohort as ch
from strv.errors import ContractViolation, FormatError, StratificationError, UnsupportedVersion
from strv.radiomics import extract_subject


def test_volume_file_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    vol = rng.normal(size=(4, 6, 5)).astype(np.float32)
    path = tmp_path / "a.vol"
    ch.save_volume(path, vol)
    back = ch.load_volume(path)
    assert back.dtype == np.float32
    assert back.tobytes() == vol.tobytes()


def test_mask_file_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    mask = rng.random((3, 5, 4)) < 0.5
    path = tmp_path / "a.msk"
    ch.save_mask(path, mask)
    assert np.array_equal(ch.load_mask(path), mask)


def test_volume_file_rejects_corruption(tmp_path):
    vol = np.zeros((2, 2, 2), dtype=np.float32)
    path = tmp_path / "v.vol"
    ch.save_volume(path, vol)

    bad_magic = tmp_path / "bad.vol"
    raw = bytearray(path.read_bytes())
    raw[0] = ord("X")
    bad_magic.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        ch.load_volume(bad_magic)

    future = tmp_path / "future.vol"
    raw = bytearray(path.read_bytes())
    raw[7] = 9
    future.write_bytes(bytes(raw))
    with pytest.raises(UnsupportedVersion):
        ch.load_volume(future)

    trunc = tmp_path / "trunc.vol"
    trunc.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(FormatError):
        ch.load_volume(trunc)


def test_generate_cohort_is_deterministic_and_balanced():
    a = ch.generate_cohort(24, (8, 16, 16), 3, seed=5)
    b = ch.generate_cohort(24, (8, 16, 16), 3, seed=5)
    c = ch.generate_cohort(24, (8, 16, 16), 3, seed=6)
    assert np.array_equal(a.labels, b.labels)
    assert a.volumes.tobytes() == b.volumes.tobytes()
    assert a.volumes.tobytes() != c.volumes.tobytes()
    counts = np.bincount(a.labels, minlength=3)
    assert counts.max() - counts.min() <= 1
    assert a.roi_names[0] == "crop" and len(a.roi_names) == 9


def test_generate_cohort_validates_plants():
    with pytest.raises(ContractViolation):
        ch.generate_cohort(12, (8, 16, 16), 2, [ch.PlantEffect(1, "nowhere", "intensity_shift", 1.0)])
    with pytest.raises(ContractViolation):
        ch.generate_cohort(12, (8, 16, 16), 2, [ch.PlantEffect(7, "g000", "intensity_shift", 1.0)])
    with pytest.raises(ContractViolation):
        ch.PlantEffect(0, "g000", "sparkle", 1.0)


def test_intensity_plant_shifts_target_region_mean():
    plants = [ch.PlantEffect(1, "g000", "intensity_shift", 3.0)]
    cohort = ch.generate_cohort(30, (8, 16, 16), 2, plants, seed=2)
    region = cohort.masks["g000"]
    means = cohort.volumes[:, region].mean(axis=1)
    class0 = means[cohort.labels == 0].mean()
    class1 = means[cohort.labels == 1].mean()
    assert class1 - class0 > 2.0


def test_cohort_round_trip_with_features(tmp_path):
    cohort = ch.generate_cohort(8, (8, 16, 16), 2, seed=3)
    ch.extract_features(cohort)
    ch.save_cohort(cohort, tmp_path / "cohort")
    back = ch.load_cohort(tmp_path / "cohort")
    assert back.subject_ids == cohort.subject_ids
    assert np.array_equal(back.labels, cohort.labels)
    assert back.volumes.tobytes() == cohort.volumes.tobytes()
    assert set(back.masks) == set(cohort.masks)
    for name in back.masks:
        assert np.array_equal(back.masks[name], cohort.masks[name])
    assert np.array_equal(back.features, cohort.features)
    assert back.n_features == 207


def test_load_cohort_requires_manifest(tmp_path):
    with pytest.raises(FormatError):
        ch.load_cohort(tmp_path)


def test_extract_features_matches_single_subject_path():
    cohort = ch.generate_cohort(4, (8, 16, 16), 2, seed=9)
    feats = ch.extract_features(cohort)
    assert feats.shape == (4, 207)
    direct = extract_subject(cohort.volumes[2], cohort.masks)
    assert np.array_equal(feats[2], direct)


def test_stratified_split_properties():
    labels = np.array([0] * 40 + [1] * 40 + [2] * 40)
    split = ch.stratified_split(labels, train_fraction=0.8, seed=0)
    assert sorted(split["train"] + split["val"]) == list(range(120))
    for c in range(3):
        train_c = sum(1 for i in split["train"] if labels[i] == c)
        val_c = sum(1 for i in split["val"] if labels[i] == c)
        assert train_c == 32 and val_c == 8
    again = ch.stratified_split(labels, train_fraction=0.8, seed=0)
    assert again == split
    assert ch.stratified_split(labels, train_fraction=0.8, seed=1) != split


def test_stratified_split_needs_two_per_class():
    with pytest.raises(StratificationError):
        ch.stratified_split(np.array([0, 0, 0, 1]), 0.8, 0)


def test_draw_support_query_disjoint_and_stratified():
    labels = np.array([0] * 30 + [1] * 30 + [2] * 30)
    train_ids = list(range(90))
    rng = np.random.default_rng(4)
    sup, qry = ch.draw_support_query(train_ids, labels, 24, 24, rng)
    assert len(sup) == 24 and len(qry) == 24
    assert not set(sup) & set(qry)
    for c in range(3):
        assert any(labels[i] == c for i in sup)
        assert any(labels[i] == c for i in qry)
    # deterministic under the same generator state
    sup2, qry2 = ch.draw_support_query(train_ids, labels, 24, 24, np.random.default_rng(4))
    assert (sup2, qry2) == (sup, qry)


def test_draw_support_query_rejects_oversized_draws():
    labels = np.array([0] * 5 + [1] * 5)
    with pytest.raises(StratificationError):
        ch.draw_support_query(list(range(10)), labels, 8, 8, np.random.default_rng(0))


def test_normalization_uses_train_rows_only():
    rng = np.random.default_rng(7)
    feats = rng.normal(size=(20, 6)) * 3.0 + 1.0
    feats[:, 4] = 2.5  # constant feature
    train_ids = list(range(12))
    mean, std = ch.normalization_stats(feats, train_ids)
    # perturbing non-train rows changes nothing
    feats2 = feats.copy()
    feats2[15] += 100.0
    mean2, std2 = ch.normalization_stats(feats2, train_ids)
    assert np.array_equal(mean, mean2) and np.array_equal(std, std2)

    z = ch.apply_normalization(feats, mean, std)
    train_z = z[train_ids]
    live = std >= 1e-12
    assert np.abs(train_z.mean(axis=0)[live]).max() < 1e-12
    assert np.abs(train_z.std(axis=0)[live] - 1.0).max() < 1e-12
    assert np.array_equal(z[:, 4], np.zeros(20))  # constant feature pins to 0


def test_normalization_clamps_outliers():
    feats = np.array([[0.0], [1.0], [2.0], [500.0]])
    mean, std = ch.normalization_stats(feats, [0, 1, 2])
    z = ch.apply_normalization(feats, mean, std)
    assert z[3, 0] == 8.0


def test_clone_cohort_layout_and_signal():
    cohort = ch.generate_clone_cohort(n_subjects=200, seed=1)
    assert cohort.features.shape == (200, 23)
    assert cohort.n_classes == 2 and cohort.roi_names == ["crop"]
    y = 2.0 * cohort.labels - 1.0
    clones = cohort.features[:, :10]
    comp = cohort.features[:, 10]
    # clones correlate with the label, the complement alone does not
    corr_clone = np.corrcoef(clones[:, 0], y)[0, 1]
    corr_comp = np.corrcoef(comp, y)[0, 1]
    assert corr_clone > 0.4
    assert abs(corr_comp) < 0.2
    # jointly u + v recovers the class signal almost noiselessly
    joint = clones[:, 0] + comp
    assert np.corrcoef(joint, y)[0, 1] > 0.95
    # clones are near-duplicates of each other
    assert np.corrcoef(clones[:, 0], clones[:, 7])[0, 1] > 0.99

    again = ch.generate_clone_cohort(n_subjects=200, seed=1)
    assert np.array_equal(again.features, cohort.features)

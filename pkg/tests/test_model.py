"""Parameter bundle: shapes, seeding, and strict checkpoint schema."""

import numpy as np
import pytest

from strv.errors import FormatError
from strv.model import (
    CTX_PROJ,
    CTX_RAW,
    EMBED_DIM,
    FUSE_HIDDEN,
    FUSE_IN,
    TOKEN_HIDDEN,
    TOKEN_IN,
    init_bundle,
    load_bundle,
    raw_view,
    save_bundle,
)
from strv.numkit import save_params


def test_init_shapes_and_zero_biases():
    b = init_bundle(n_rois=9, n_classes=3, n_features=207, seed=5)
    enc, sc, cls = b.encoder, b.scorer, b.classifier
    assert enc.roi_emb.shape == (9, 8)
    assert enc.family_emb.shape == (4, 8)
    assert enc.feature_emb.shape == (23, 8)
    assert enc.w1.shape == (TOKEN_IN, TOKEN_HIDDEN)
    assert enc.w2.shape == (TOKEN_HIDDEN, EMBED_DIM)
    assert sc.ctx_w.shape == (CTX_RAW, CTX_PROJ)
    assert sc.fus_w1.shape == (FUSE_IN, FUSE_HIDDEN)
    assert sc.fus_w2.shape == (FUSE_HIDDEN, 1)
    assert cls.w.shape == (EMBED_DIM, 3)
    for bias in (enc.b1, enc.b2, sc.ctx_b, sc.fus_b1, sc.fus_b2, cls.b):
        assert np.all(bias.data == 0.0)
    assert b.n_classes == 3
    assert b.n_rois == 9
    assert b.norm_mean.shape == (207,)
    assert np.all(b.norm_std == 1.0)


def test_init_seeded_and_glorot_bounded():
    a = init_bundle(9, 3, 207, seed=7)
    b = init_bundle(9, 3, 207, seed=7)
    c = init_bundle(9, 3, 207, seed=8)
    assert np.array_equal(a.encoder.w1.data, b.encoder.w1.data)
    assert not np.array_equal(a.encoder.w1.data, c.encoder.w1.data)
    limit = np.sqrt(6.0 / (TOKEN_IN + TOKEN_HIDDEN))
    assert np.abs(a.encoder.w1.data).max() <= limit


def test_param_lists_cover_all_tensors():
    b = init_bundle(9, 2, 207, seed=0)
    assert len(b.encoder_params()) == 7
    assert len(b.scorer_params()) == 6
    assert len(b.classifier_params()) == 2
    assert len(b.all_params()) == 15
    assert all(p.requires_grad for p in b.all_params())


def test_raw_view_shares_storage():
    b = init_bundle(9, 2, 207, seed=0)
    raw = raw_view(b.encoder)
    raw.w1[0, 0] = 123.0
    assert b.encoder.w1.data[0, 0] == 123.0


def test_checkpoint_round_trip_bit_exact(tmp_path):
    b = init_bundle(9, 4, 207, seed=11)
    b.norm_mean = np.linspace(-1, 1, 207)
    b.norm_std = np.linspace(0.5, 2, 207)
    path = tmp_path / "model.ckpt"
    save_bundle(path, b)
    back = load_bundle(path)
    assert np.array_equal(back.encoder.w1.data, b.encoder.w1.data)
    assert np.array_equal(back.scorer.fus_w2.data, b.scorer.fus_w2.data)
    assert np.array_equal(back.classifier.b.data, b.classifier.b.data)
    assert np.array_equal(back.norm_mean, b.norm_mean)
    assert np.array_equal(back.norm_std, b.norm_std)
    assert back.all_params()[0].requires_grad


def test_checkpoint_schema_is_strict(tmp_path):
    b = init_bundle(9, 2, 23, seed=0)
    path = tmp_path / "model.ckpt"
    save_bundle(path, b)
    named = {}
    from strv.numkit import load_params

    named = load_params(path)
    extra = dict(named)
    extra["encoder.mystery"] = np.zeros(3)
    bad1 = tmp_path / "extra.ckpt"
    save_params(bad1, extra)
    with pytest.raises(FormatError):
        load_bundle(bad1)

    missing = dict(named)
    del missing["scorer.ctx_w"]
    bad2 = tmp_path / "missing.ckpt"
    save_params(bad2, missing)
    with pytest.raises(FormatError):
        load_bundle(bad2)

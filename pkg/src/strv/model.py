"""Learned-parameter containers and their checkpoint schema.

Three parameter groups: the token set encoder, the candidate scorer, and
the linear classifier head, plus the feature normalization statistics the
model was trained with. Dimensions are fixed by design: metadata embedding
width 8, token input 1 + 3*8 = 25, token MLP width 64, set embedding 64,
raw image context 128 (4x4x4 block means and stds), projected context 64,
fusion hidden width 128.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from .errors import FormatError
from .numkit import Tensor, glorot_uniform, load_params, save_params

EMB_WIDTH = 8
TOKEN_IN = 1 + 3 * EMB_WIDTH
TOKEN_HIDDEN = 64
EMBED_DIM = 64
CTX_RAW = 128
CTX_PROJ = 64
FUSE_IN = CTX_PROJ + EMBED_DIM
FUSE_HIDDEN = 128
N_FAMILIES = 4
ROSTER_SIZE = 23


@dataclass
class EncoderParams:
    roi_emb: Tensor  # (n_rois, 8)
    family_emb: Tensor  # (4, 8)
    feature_emb: Tensor  # (23, 8)
    w1: Tensor  # (25, 64)
    b1: Tensor  # (64,)
    w2: Tensor  # (64, 64)
    b2: Tensor  # (64,)


@dataclass
class ScorerParams:
    ctx_w: Tensor  # (128, 64)
    ctx_b: Tensor  # (64,)
    fus_w1: Tensor  # (128, 128)
    fus_b1: Tensor  # (128,)
    fus_w2: Tensor  # (128, 1)
    fus_b2: Tensor  # (1,)


@dataclass
class ClassifierParams:
    w: Tensor  # (64, C)
    b: Tensor  # (C,)


def _param_list(group) -> list[Tensor]:
    return [getattr(group, f.name) for f in fields(group)]


def raw_view(group) -> SimpleNamespace:
    """Plain-ndarray view of a parameter group (shared storage, no tape)."""
    return SimpleNamespace(**{f.name: getattr(group, f.name).data for f in fields(group)})


@dataclass
class ModelBundle:
    encoder: EncoderParams
    scorer: ScorerParams
    classifier: ClassifierParams
    norm_mean: np.ndarray  # (F,)
    norm_std: np.ndarray  # (F,)

    def encoder_params(self) -> list[Tensor]:
        return _param_list(self.encoder)

    def scorer_params(self) -> list[Tensor]:
        return _param_list(self.scorer)

    def classifier_params(self) -> list[Tensor]:
        return _param_list(self.classifier)

    def all_params(self) -> list[Tensor]:
        return self.encoder_params() + self.scorer_params() + self.classifier_params()

    @property
    def n_classes(self) -> int:
        return self.classifier.b.data.shape[0]

    @property
    def n_rois(self) -> int:
        return self.encoder.roi_emb.data.shape[0]


def init_bundle(n_rois: int, n_classes: int, n_features: int, seed: int = 0) -> ModelBundle:
    """Glorot-uniform weights (embedding tables included), zero biases."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 404]))

    def w(shape):
        return Tensor(glorot_uniform(shape, rng), requires_grad=True)

    def z(*shape):
        return Tensor(np.zeros(shape), requires_grad=True)

    encoder = EncoderParams(
        roi_emb=w((n_rois, EMB_WIDTH)),
        family_emb=w((N_FAMILIES, EMB_WIDTH)),
        feature_emb=w((ROSTER_SIZE, EMB_WIDTH)),
        w1=w((TOKEN_IN, TOKEN_HIDDEN)),
        b1=z(TOKEN_HIDDEN),
        w2=w((TOKEN_HIDDEN, EMBED_DIM)),
        b2=z(EMBED_DIM),
    )
    scorer = ScorerParams(
        ctx_w=w((CTX_RAW, CTX_PROJ)),
        ctx_b=z(CTX_PROJ),
        fus_w1=w((FUSE_IN, FUSE_HIDDEN)),
        fus_b1=z(FUSE_HIDDEN),
        fus_w2=w((FUSE_HIDDEN, 1)),
        fus_b2=z(1),
    )
    classifier = ClassifierParams(w=w((EMBED_DIM, n_classes)), b=z(n_classes))
    return ModelBundle(
        encoder=encoder,
        scorer=scorer,
        classifier=classifier,
        norm_mean=np.zeros(n_features),
        norm_std=np.ones(n_features),
    )


def _named_arrays(bundle: ModelBundle) -> dict[str, np.ndarray]:
    named: dict[str, np.ndarray] = {}
    for prefix, group in (
        ("encoder", bundle.encoder),
        ("scorer", bundle.scorer),
        ("classifier", bundle.classifier),
    ):
        for f in fields(group):
            named[f"{prefix}.{f.name}"] = getattr(group, f.name).data
    named["norm.mean"] = bundle.norm_mean
    named["norm.std"] = bundle.norm_std
    return named


def save_bundle(path: str | Path, bundle: ModelBundle) -> None:
    save_params(path, _named_arrays(bundle))


def load_bundle(path: str | Path) -> ModelBundle:
    """Strict load: the checkpoint must carry exactly the known tensor names."""
    named = load_params(path)
    expected_groups = {
        "encoder": EncoderParams,
        "scorer": ScorerParams,
        "classifier": ClassifierParams,
    }
    expected_names = {
        f"{prefix}.{f.name}" for prefix, cls in expected_groups.items() for f in fields(cls)
    } | {"norm.mean", "norm.std"}
    got = set(named)
    if got != expected_names:
        unknown = sorted(got - expected_names)
        missing = sorted(expected_names - got)
        raise FormatError(f"checkpoint schema mismatch: unknown={unknown}, missing={missing}")

    groups = {}
    for prefix, cls in expected_groups.items():
        groups[prefix] = cls(
            **{f.name: Tensor(named[f"{prefix}.{f.name}"], requires_grad=True) for f in fields(cls)}
        )
    return ModelBundle(
        encoder=groups["encoder"],
        scorer=groups["scorer"],
        classifier=groups["classifier"],
        norm_mean=named["norm.mean"],
        norm_std=named["norm.std"],
    )

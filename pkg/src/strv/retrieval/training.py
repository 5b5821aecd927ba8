"""Two-stage training orchestration and retrieval inference.

Stage 1 warm-starts the encoder and scorer: every epoch draws a fresh
support/query split, samples random candidate sets per training subject,
computes their probe rewards, and regresses scores onto rewards (MSE).
Stage 2 switches to retrieval-driven supervision: per-subject pools are
rebuilt each epoch with the current scorer, the top-scored set feeds the
classifier (cross-entropy), and Q pool members get probe rewards for
ongoing score supervision. The run performs exactly one stage-1 -> stage-2
alternation.

Every random draw derives from a stateless seed chain
(config seed, stream tag, epoch, subject position), so a run checkpointed
at the stage boundary and resumed replays stage 2 bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import numkit as nk
from ..cohort import (
    Cohort,
    apply_normalization,
    cohort_descriptors,
    draw_support_query,
    normalization_stats,
    stratified_split,
)
from ..config import RetrievalConfig
from ..errors import ConfigError, ContractViolation
from ..model import ModelBundle, init_bundle, load_bundle, raw_view, save_bundle
from ..probe import rewards_for_sets
from ..scorer import context_matrix, score_sets
from ..setenc import descriptor_id_arrays, encode_sets, token_outputs
from .pools import CandidatePool, SelectionResult, build_pool, select_top1
from .sampling import sample_sets

TAG_S1_DRAW = 11
TAG_S1_SETS = 12
TAG_EVAL_BATCH = 13
TAG_S2_DRAW = 21
TAG_POOL = 22
TAG_RETRIEVE = 23

STAGE1_CKPT = "stage1.ckpt"
FINAL_CKPT = "final.ckpt"
HISTORY_FILE = "history.jsonl"

_EVAL_SUBJECTS = 8
_EVAL_SETS = 30
_ADAM_LR = 1e-3


def _rng(*parts: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(parts)))


@dataclass
class TrainingData:
    """Cohort-derived arrays the pipeline consumes (features z-scored)."""

    features: np.ndarray  # (N, F)
    labels: np.ndarray  # (N,)
    contexts: np.ndarray  # (N, 128)
    ids: tuple  # descriptor id arrays (roi, family, feature)
    descriptors: list
    train_ids: np.ndarray
    val_ids: np.ndarray
    n_classes: int
    subject_names: list
    norm_mean: np.ndarray
    norm_std: np.ndarray

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def prepare_training_data(cohort: Cohort, config: RetrievalConfig) -> TrainingData:
    if cohort.features is None:
        raise ContractViolation("cohort has no extracted features; run extraction first")
    config.validate(n_features=cohort.features.shape[1])
    split = stratified_split(cohort.labels, config.train_fraction, config.seed)
    train_ids = np.asarray(split["train"], dtype=np.int64)
    val_ids = np.asarray(split["val"], dtype=np.int64)
    if config.n_support + config.n_query > train_ids.size:
        raise ConfigError(
            f"support+query draw ({config.n_support}+{config.n_query}) exceeds "
            f"{train_ids.size} training subjects"
        )
    mean, std = normalization_stats(cohort.features, train_ids)
    features = apply_normalization(cohort.features, mean, std)
    descriptors = cohort_descriptors(cohort)
    return TrainingData(
        features=features,
        labels=cohort.labels,
        contexts=context_matrix(cohort.volumes),
        ids=descriptor_id_arrays(descriptors),
        descriptors=descriptors,
        train_ids=train_ids,
        val_ids=val_ids,
        n_classes=cohort.n_classes,
        subject_names=list(cohort.subject_ids),
        norm_mean=mean,
        norm_std=std,
    )


def _make_eval_batch(data: TrainingData, config: RetrievalConfig):
    """Fixed (subject, sets, rewards) triples for comparable epoch losses."""
    rng = _rng(config.seed, TAG_EVAL_BATCH)
    support, query = draw_support_query(
        data.train_ids, data.labels, config.n_support, config.n_query, rng
    )
    subjects = data.train_ids[: min(_EVAL_SUBJECTS, data.train_ids.size)]
    batch = []
    for subject in subjects:
        sets = sample_sets(data.n_features, config.k, _EVAL_SETS, rng)
        rewards = rewards_for_sets(
            sets, support, query, data.features, data.labels,
            data.n_classes, config.probe_steps,
        )
        batch.append((int(subject), sets, rewards))
    return batch


def _eval_scr_loss(bundle: ModelBundle, data: TrainingData, eval_batch) -> float:
    enc_raw, scorer_raw = raw_view(bundle.encoder), raw_view(bundle.scorer)
    losses = []
    for subject, sets, rewards in eval_batch:
        out = token_outputs(data.features[subject], data.ids, enc_raw)
        scores = score_sets(data.contexts[subject], encode_sets(out, sets), scorer_raw)
        losses.append(float(np.mean((scores - rewards) ** 2)))
    return float(np.mean(losses))


def stage1_train(bundle: ModelBundle, data: TrainingData, config: RetrievalConfig) -> list[dict]:
    """Warm-start epochs: regress candidate scores onto probe rewards."""
    params = bundle.encoder_params() + bundle.scorer_params()
    opt = nk.Adam(params, lr=_ADAM_LR)
    eval_batch = _make_eval_batch(data, config)
    history = []
    for epoch in range(config.stage1_epochs):
        support, query = draw_support_query(
            data.train_ids, data.labels, config.n_support, config.n_query,
            _rng(config.seed, TAG_S1_DRAW, epoch),
        )
        train_losses = []
        reward_sum, reward_count = 0.0, 0
        for position, subject in enumerate(data.train_ids):
            rng = _rng(config.seed, TAG_S1_SETS, epoch, position)
            sets = sample_sets(data.n_features, config.k, config.stage1_sets_per_subject, rng)
            rewards = rewards_for_sets(
                sets, support, query, data.features, data.labels,
                data.n_classes, config.probe_steps,
            )
            out = token_outputs(data.features[subject], data.ids, bundle.encoder)
            scores = score_sets(data.contexts[subject], encode_sets(out, sets), bundle.scorer)
            loss = nk.mse(scores, rewards)
            nk.zero_grads(params)
            nk.backward(loss, params=params)
            opt.step()
            train_losses.append(float(loss.data))
            reward_sum += float(rewards.sum())
            reward_count += rewards.size
        history.append(
            {
                "stage": 1,
                "epoch": epoch,
                "L_cls": None,
                "L_scr": _eval_scr_loss(bundle, data, eval_batch),
                "train_L_scr": float(np.mean(train_losses)),
                "mean_reward": reward_sum / reward_count,
            }
        )
    return history


def _build_epoch_pools(
    bundle: ModelBundle, data: TrainingData, config: RetrievalConfig, epoch: int,
    support: np.ndarray, query: np.ndarray,
) -> list[CandidatePool]:
    enc_raw, scorer_raw = raw_view(bundle.encoder), raw_view(bundle.scorer)
    pools = []
    for position, subject in enumerate(data.train_ids):
        rng = _rng(config.seed, TAG_POOL, epoch, position)
        out = token_outputs(data.features[subject], data.ids, enc_raw)
        pool = build_pool(
            int(subject), out, data.contexts[subject], scorer_raw,
            data.n_features, config, rng,
        )
        pool.rewards = rewards_for_sets(
            pool.sets[pool.supervised_rows], support, query,
            data.features, data.labels, data.n_classes, config.probe_steps,
        )
        pools.append(pool)
    return pools


def joint_train_step(
    pools_batch: list[CandidatePool],
    bundle: ModelBundle,
    data: TrainingData,
    config: RetrievalConfig,
    opt: nk.Adam,
) -> tuple[float, float, float]:
    """One optimizer step on (encoder, scorer, classifier) jointly.

    Returns (L_cls, L_scr, total). L_cls is the classifier cross-entropy
    on each subject's top-scored set; L_scr is the mean squared
    score-vs-reward error over the Q supervised pool members.
    """
    if not pools_batch:
        raise ContractViolation("joint_train_step needs a non-empty batch")
    params = bundle.all_params()
    cls = bundle.classifier
    cls_sum = None
    scr_sum = None
    for pool in pools_batch:
        if pool.rewards is None:
            raise ContractViolation("pool rewards missing; compute them before the joint step")
        subject = pool.subject_id
        out = token_outputs(data.features[subject], data.ids, bundle.encoder)
        emb_q = encode_sets(out, pool.sets[pool.supervised_rows])
        scores_q = score_sets(data.contexts[subject], emb_q, bundle.scorer)
        loss_scr = nk.mse(scores_q, pool.rewards)
        emb_star = encode_sets(out, pool.sets[:1])
        logits = nk.add_bias(nk.matmul(emb_star, cls.w), cls.b)
        probs = nk.softmax(logits)
        loss_cls = nk.cross_entropy(probs, np.array([data.labels[subject]]))
        cls_sum = loss_cls if cls_sum is None else nk.add(cls_sum, loss_cls)
        scr_sum = loss_scr if scr_sum is None else nk.add(scr_sum, loss_scr)
    inv = 1.0 / len(pools_batch)
    l_cls = nk.mul(cls_sum, inv)
    l_scr = nk.mul(scr_sum, inv)
    total = nk.add(l_cls, nk.mul(l_scr, config.lambda_scr))
    nk.zero_grads(params)
    nk.backward(total, params=params)
    opt.step()
    return float(l_cls.data), float(l_scr.data), float(total.data)


def stage2_train(bundle: ModelBundle, data: TrainingData, config: RetrievalConfig) -> list[dict]:
    """Retrieval-supervised epochs over rebuilt per-subject pools."""
    params = bundle.all_params()
    opt = nk.Adam(params, lr=_ADAM_LR)
    history = []
    for epoch in range(config.stage2_epochs):
        support, query = draw_support_query(
            data.train_ids, data.labels, config.n_support, config.n_query,
            _rng(config.seed, TAG_S2_DRAW, epoch),
        )
        pools = _build_epoch_pools(bundle, data, config, epoch, support, query)
        cls_losses, scr_losses = [], []
        for start in range(0, len(pools), config.subject_batch):
            l_cls, l_scr, _ = joint_train_step(
                pools[start : start + config.subject_batch], bundle, data, config, opt
            )
            cls_losses.append(l_cls)
            scr_losses.append(l_scr)
        history.append(
            {
                "stage": 2,
                "epoch": epoch,
                "L_cls": float(np.mean(cls_losses)),
                "L_scr": float(np.mean(scr_losses)),
                "mean_reward": float(np.mean([pool.rewards.mean() for pool in pools])),
            }
        )
    return history


def run_training(
    cohort: Cohort,
    config: RetrievalConfig,
    out_dir: str | Path | None = None,
    resume_from: str | Path | None = None,
):
    """Full run: stage 1, boundary checkpoint, stage 2, final checkpoint.

    `resume_from` restarts from a stage-1 checkpoint and replays stage 2
    bitwise (stateless seed chains, fresh stage-2 optimizer).
    Returns (bundle, history, data).
    """
    data = prepare_training_data(cohort, config)
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    history: list[dict] = []
    if resume_from is None:
        bundle = init_bundle(
            n_rois=len(cohort.roi_names),
            n_classes=data.n_classes,
            n_features=data.n_features,
            seed=config.seed,
        )
        bundle.norm_mean = data.norm_mean
        bundle.norm_std = data.norm_std
        history.extend(stage1_train(bundle, data, config))
        if out_path is not None:
            save_bundle(out_path / STAGE1_CKPT, bundle)
    else:
        bundle = load_bundle(resume_from)

    history.extend(stage2_train(bundle, data, config))
    if out_path is not None:
        save_bundle(out_path / FINAL_CKPT, bundle)
        write_history(out_path / HISTORY_FILE, history)
    return bundle, history, data


def write_history(path: str | Path, history: list[dict]) -> None:
    with open(path, "w") as fh:
        for record in history:
            fh.write(json.dumps(record) + "\n")


def read_history(path: str | Path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def run_retrieval(
    bundle: ModelBundle,
    data: TrainingData,
    config: RetrievalConfig,
    subject_indices,
    subpool: np.ndarray | None = None,
    candidate_sets: np.ndarray | None = None,
    score_fn=None,
) -> tuple[list[SelectionResult], list[CandidatePool]]:
    """Build a pool and select the top set for each requested subject.

    Deterministic: the sampling stream is keyed by (seed, tag, subject).
    `subpool`/`candidate_sets`/`score_fn` support restricted oracle audits;
    an explicit `candidate_sets` array is shared across subjects and skips
    the per-subject sampling stream entirely.
    """
    enc_raw, scorer_raw = raw_view(bundle.encoder), raw_view(bundle.scorer)
    selections, pools = [], []
    for subject in subject_indices:
        subject = int(subject)
        rng = _rng(config.seed, TAG_RETRIEVE, subject)
        out = token_outputs(data.features[subject], data.ids, enc_raw)
        pool = build_pool(
            subject, out, data.contexts[subject], scorer_raw,
            data.n_features, config, rng, subpool=subpool,
            candidate_sets=candidate_sets, score_fn=score_fn,
        )
        pools.append(pool)
        selections.append(select_top1(pool))
    return selections, pools

"""Sampling uniformity, pools, oracle enumeration, and training orchestration."""

import dataclasses
import math

import numpy as np
import pytest
from scipy import stats

from strv.cohort import draw_support_query, extract_features, generate_cohort
from strv.config import RetrievalConfig
from strv.errors import BudgetExceededError, ContractViolation
from strv.model import init_bundle, raw_view
from strv.probe import rewards_for_sets
from strv.retrieval import (
    CandidatePool,
    build_pool,
    empirical_tail_integral,
    enumerate_subsets,
    exhaustive_oracle,
    gap_statistics,
    prepare_training_data,
    raw_sample_sets,
    read_gap_csv,
    read_history,
    run_retrieval,
    run_training,
    sample_sets,
    select_top1,
    write_gap_csv,
    write_history,
)
from strv.retrieval.training import joint_train_step, stage1_train
from strv import numkit as nk

# ---------------------------------------------------------------- sampling


def test_raw_sampling_uniform_chi_square():
    """10^5 draws over the C(6,2)=15 pairs: chi-square GOF at alpha=0.01."""
    rng = np.random.default_rng(np.random.SeedSequence([4242]))
    draws = raw_sample_sets(6, 2, 100_000, rng)
    pairs = list(map(tuple, enumerate_subsets(np.arange(6), 2)))
    cell = {pair: i for i, pair in enumerate(pairs)}
    counts = np.zeros(15)
    np.add.at(counts, [cell[(int(a), int(b))] for a, b in draws], 1)
    expected = draws.shape[0] / 15
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < stats.chi2.ppf(0.99, df=14), f"chi2={chi2:.2f}"


def test_sample_sets_unique_sorted():
    rng = np.random.default_rng(1)
    sets = sample_sets(50, 5, 200, rng)
    assert sets.shape == (200, 5)
    assert np.all(np.diff(sets, axis=1) > 0)  # strictly increasing rows
    assert np.unique(sets, axis=0).shape[0] == 200


def test_sample_sets_exhausts_small_space():
    """Asking for all C(10,3)=120 subsets must return every one of them."""
    rng = np.random.default_rng(7)
    sets = sample_sets(10, 3, 120, rng)
    got = np.unique(sets, axis=0)
    want = enumerate_subsets(np.arange(10), 3)
    assert np.array_equal(got, want)


def test_sample_sets_rejects_impossible_count():
    rng = np.random.default_rng(0)
    with pytest.raises(ContractViolation, match=r"C\(10,3\) = 120"):
        sample_sets(10, 3, 121, rng)
    with pytest.raises(ContractViolation):
        sample_sets(10, 3, 0, rng)


def test_sample_sets_degenerate_full_set():
    rng = np.random.default_rng(0)
    sets = sample_sets(3, 3, 1, rng)
    assert np.array_equal(sets, [[0, 1, 2]])


def test_raw_sampling_k_bounds():
    rng = np.random.default_rng(0)
    with pytest.raises(ContractViolation):
        raw_sample_sets(5, 0, 10, rng)
    with pytest.raises(ContractViolation):
        raw_sample_sets(5, 6, 10, rng)


# ------------------------------------------------------------------ pools


def _tiny_config(**overrides) -> RetrievalConfig:
    base = dict(
        k=3, p0_size=40, pool_m=12, q=4, stage1_epochs=2,
        stage1_sets_per_subject=6, stage2_epochs=2, subject_batch=4,
        n_support=4, n_query=4, probe_steps=3, seed=0,
    )
    base.update(overrides)
    return RetrievalConfig(**base)


def _pool_inputs(n_features=30, seed=3):
    bundle = init_bundle(n_rois=2, n_classes=2, n_features=n_features, seed=seed)
    rng = np.random.default_rng(seed)
    z_row = rng.normal(size=n_features)
    ids = (
        rng.integers(0, 2, size=n_features),
        rng.integers(0, 4, size=n_features),
        rng.integers(0, 23, size=n_features),
    )
    from strv.setenc import token_outputs

    out = token_outputs(z_row, ids, raw_view(bundle.encoder))
    context = rng.normal(size=128)
    return bundle, out, context


def test_build_pool_contract():
    config = _tiny_config()
    bundle, out, context = _pool_inputs()
    pool = build_pool(
        "s0", out, context, raw_view(bundle.scorer), 30, config,
        np.random.default_rng(11),
    )
    assert pool.size == config.pool_m
    assert np.all(np.diff(pool.scores) <= 0)  # non-increasing
    assert np.unique(pool.sets, axis=0).shape[0] == pool.size
    assert np.all(np.diff(pool.sets, axis=1) > 0)  # each row sorted
    rows = pool.supervised_rows
    assert rows.shape == (config.q,)
    assert np.all((0 <= rows) & (rows < pool.size))
    assert np.all(np.diff(rows) > 0)  # sorted unique


def test_build_pool_m_equals_p0_keeps_everything():
    config = _tiny_config(p0_size=25, pool_m=25)
    bundle, out, context = _pool_inputs()
    pool = build_pool(
        "s0", out, context, raw_view(bundle.scorer), 30, config,
        np.random.default_rng(2),
    )
    assert pool.size == 25


def test_build_pool_score_ties_break_lexicographically():
    """Under a constant score function the pool must come out in
    lexicographic set order (stable sort over the canonical ordering)."""
    config = _tiny_config(p0_size=30, pool_m=30)
    bundle, out, context = _pool_inputs()
    pool = build_pool(
        "s0", out, context, raw_view(bundle.scorer), 30, config,
        np.random.default_rng(5), score_fn=lambda sets: np.zeros(sets.shape[0]),
    )
    want = pool.sets[np.lexsort(pool.sets.T[::-1])]
    assert np.array_equal(pool.sets, want)


def test_build_pool_subpool_restriction():
    config = _tiny_config(p0_size=20, pool_m=20)
    bundle, out, context = _pool_inputs()
    subpool = np.array([2, 4, 7, 11, 12, 19, 23, 29])
    pool = build_pool(
        "s0", out, context, raw_view(bundle.scorer), 30, config,
        np.random.default_rng(8), subpool=subpool,
    )
    assert np.isin(pool.sets, subpool).all()
    with pytest.raises(ContractViolation, match="unique"):
        build_pool(
            "s0", out, context, raw_view(bundle.scorer), 30, config,
            np.random.default_rng(8), subpool=np.array([1, 1, 2]),
        )
    with pytest.raises(ContractViolation, match="outside"):
        build_pool(
            "s0", out, context, raw_view(bundle.scorer), 30, config,
            np.random.default_rng(8), subpool=np.array([5, 30]),
        )


def test_build_pool_candidate_sets_dedup_guard():
    config = _tiny_config()
    bundle, out, context = _pool_inputs()
    dupes = np.array([[0, 1, 2], [2, 1, 0]])  # same set after sorting
    with pytest.raises(ContractViolation, match="duplicate"):
        build_pool(
            "s0", out, context, raw_view(bundle.scorer), 30, config,
            np.random.default_rng(0), candidate_sets=dupes,
        )


def test_larger_candidate_budget_never_hurts_top1():
    """Scoring a superset of candidates can only raise the best score."""
    config = _tiny_config(p0_size=300, pool_m=10)
    bundle, out, context = _pool_inputs(n_features=40)
    all_sets = sample_sets(40, 3, 300, np.random.default_rng(17))

    def run(cands):
        pool = build_pool(
            "s0", out, context, raw_view(bundle.scorer), 40, config,
            np.random.default_rng(0), candidate_sets=cands,
        )
        return select_top1(pool).score

    scores = [run(all_sets[:n]) for n in (30, 100, 300)]
    assert scores[0] <= scores[1] <= scores[2]


def test_select_top1_contract():
    config = _tiny_config()
    bundle, out, context = _pool_inputs()
    pool = build_pool(
        "s0", out, context, raw_view(bundle.scorer), 30, config,
        np.random.default_rng(4),
    )
    sel = select_top1(pool)
    assert np.array_equal(sel.s_star, pool.sets[0])
    assert sel.score == pool.scores[0]
    assert np.array_equal(sel.ensemble_sets, pool.sets[:3])
    empty = CandidatePool(
        subject_id="x",
        sets=np.empty((0, 3), dtype=np.int64),
        scores=np.empty(0),
        supervised_rows=np.empty(0, dtype=np.int64),
    )
    with pytest.raises(ContractViolation):
        select_top1(empty)


# ----------------------------------------------------------------- oracle


def _feature_space_problem(seed=0, n=40, n_features=12, n_classes=2):
    """Small feature-space classification problem with one planted pair."""
    rng = np.random.default_rng(seed)
    labels = np.arange(n, dtype=np.int64) % n_classes
    rng.shuffle(labels)
    X = rng.normal(size=(n, n_features))
    X[:, 3] += 1.5 * (2.0 * (labels == 1) - 1.0)
    ids = np.arange(n)
    support, query = ids[: n // 2], ids[n // 2 :]
    return X, labels, support, query


def test_enumerate_subsets_order_and_count():
    subpool = np.array([9, 2, 5])
    sets = enumerate_subsets(subpool, 2)
    assert np.array_equal(sets, [[2, 5], [2, 9], [5, 9]])
    assert enumerate_subsets(np.arange(10), 3).shape == (120, 3)
    with pytest.raises(ContractViolation):
        enumerate_subsets(np.array([1, 1, 2]), 2)


def test_exhaustive_oracle_matches_direct_rewards():
    X, labels, support, query = _feature_space_problem()
    subpool = np.arange(8)
    res = exhaustive_oracle(subpool, 2, support, query, X, labels, 2, probe_steps=4)
    assert res.sets.shape == (math.comb(8, 2), 2)
    direct = rewards_for_sets(res.sets, support, query, X, labels, 2, steps=4)
    assert np.array_equal(res.rewards, direct)
    assert res.r_max == direct.max()
    assert res.reward_of([3, 5]) == direct[np.nonzero((res.sets == [3, 5]).all(axis=1))[0][0]]
    assert res.reward_of([5, 3]) == res.reward_of([3, 5])  # order-free lookup
    with pytest.raises(ContractViolation, match="not in the enumerated"):
        res.reward_of([3, 11])


def test_oracle_budget_refusal_names_count():
    X, labels, support, query = _feature_space_problem()
    with pytest.raises(BudgetExceededError, match=r"C\(12,5\) = 792"):
        exhaustive_oracle(
            np.arange(12), 5, support, query, X, labels, 2, budget=791
        )


def test_oracle_as_scorer_closes_gap():
    """With the true reward as score function, retrieval over the full
    enumeration must pick the oracle optimum: gap exactly 0."""
    X, labels, support, query = _feature_space_problem()
    subpool = np.arange(10)
    oracle = exhaustive_oracle(subpool, 3, support, query, X, labels, 2, probe_steps=4)
    config = _tiny_config(k=3, p0_size=120, pool_m=120, q=1)
    bundle, out, context = _pool_inputs(n_features=12)

    def oracle_score(sets):
        return np.array([oracle.reward_of(s) for s in sets])

    pool = build_pool(
        "s0", out, context, raw_view(bundle.scorer), 12, config,
        np.random.default_rng(0), subpool=subpool, score_fn=oracle_score,
    )
    sel = select_top1(pool)
    assert oracle.reward_of(sel.s_star) == oracle.r_max


# ------------------------------------------------------------- gap stats


def test_tail_integral_equals_mean():
    rng = np.random.default_rng(3)
    for _ in range(20):
        gaps = rng.exponential(scale=0.1, size=rng.integers(1, 400))
        assert abs(empirical_tail_integral(gaps) - gaps.mean()) <= 1e-12


def test_tail_integral_frozen_example():
    gaps = np.array([0.0, 0.0, 0.2])
    assert abs(empirical_tail_integral(gaps) - 1.0 / 15.0) <= 1e-15


def test_gap_statistics_contract():
    stats_ = gap_statistics([0.0, 0.0, 0.2])
    assert stats_.count == 3
    assert abs(stats_.mean - stats_.tail_integral) <= 1e-12
    assert stats_.percentiles[50] == 0.0
    assert np.array_equal(stats_.tail_thresholds, [0.0, 0.2])
    assert np.allclose(stats_.tail_survival, [1.0 / 3.0, 0.0])
    with pytest.raises(ContractViolation):
        gap_statistics([])
    with pytest.raises(ContractViolation):
        gap_statistics([-0.1, 0.2])


def test_gap_csv_round_trip(tmp_path):
    rows = [
        {"subject_id": "s0", "r_star": -0.671234567890123, "r_max": -0.66, "gap": 0.011234567890123},
        {"subject_id": "s1", "r_star": -0.7, "r_max": -0.7, "gap": 0.0},
    ]
    path = tmp_path / "gaps.csv"
    write_gap_csv(path, rows)
    back = read_gap_csv(path)
    assert back == rows
    header = path.read_text().splitlines()[0]
    assert header == "subject_id,R_star,R_max,gap"


# ------------------------------------------------------------ training


@pytest.fixture(scope="module")
def tiny_cohort():
    cohort = generate_cohort(16, (8, 16, 16), 2, seed=5)
    extract_features(cohort)
    return cohort


def test_prepare_training_data(tiny_cohort):
    config = _tiny_config()
    data = prepare_training_data(tiny_cohort, config)
    assert data.features.shape == (16, tiny_cohort.n_features)
    assert data.contexts.shape == (16, 128)
    assert data.train_ids.size + data.val_ids.size == 16
    # z-scored against the train split
    train_rows = data.features[data.train_ids]
    assert np.allclose(train_rows.mean(axis=0), 0.0, atol=1e-9)
    with pytest.raises(Exception):
        prepare_training_data(tiny_cohort, _tiny_config(n_support=50))


def test_stage1_eval_loss_decreases(tiny_cohort):
    config = _tiny_config(stage1_epochs=10, stage1_sets_per_subject=8)
    data = prepare_training_data(tiny_cohort, config)
    bundle = init_bundle(
        len(tiny_cohort.roi_names), data.n_classes, data.n_features, config.seed
    )
    history = stage1_train(bundle, data, config)
    assert len(history) == config.stage1_epochs
    assert all(rec["stage"] == 1 and rec["L_cls"] is None for rec in history)
    assert all(rec["mean_reward"] <= 0.0 for rec in history)
    assert history[-1]["L_scr"] < history[0]["L_scr"]


def _pools_for_joint(bundle, data, config):
    from strv.retrieval.training import _build_epoch_pools

    support, query = draw_support_query(
        data.train_ids, data.labels, config.n_support, config.n_query,
        np.random.default_rng(0),
    )
    return _build_epoch_pools(bundle, data, config, 0, support, query)


def test_joint_step_lambda_zero_total_is_cls(tiny_cohort):
    config = _tiny_config(lambda_scr=0.0)
    data = prepare_training_data(tiny_cohort, config)
    bundle = init_bundle(
        len(tiny_cohort.roi_names), data.n_classes, data.n_features, config.seed
    )
    pools = _pools_for_joint(bundle, data, config)[:4]
    opt = nk.Adam(bundle.all_params(), lr=1e-3)
    l_cls, l_scr, total = joint_train_step(pools, bundle, data, config, opt)
    assert total == l_cls
    assert l_scr > 0.0


def test_joint_step_zero_classifier_gives_log_c(tiny_cohort):
    config = _tiny_config()
    data = prepare_training_data(tiny_cohort, config)
    bundle = init_bundle(
        len(tiny_cohort.roi_names), data.n_classes, data.n_features, config.seed
    )
    raw_view(bundle.classifier).w[:] = 0.0
    raw_view(bundle.classifier).b[:] = 0.0
    pools = _pools_for_joint(bundle, data, config)[:4]
    opt = nk.Adam(bundle.all_params(), lr=1e-3)
    l_cls, _, _ = joint_train_step(pools, bundle, data, config, opt)
    assert abs(l_cls - np.log(data.n_classes)) <= 1e-12


def test_joint_step_requires_rewards(tiny_cohort):
    config = _tiny_config()
    data = prepare_training_data(tiny_cohort, config)
    bundle = init_bundle(
        len(tiny_cohort.roi_names), data.n_classes, data.n_features, config.seed
    )
    pools = _pools_for_joint(bundle, data, config)[:2]
    pools[0].rewards = None
    opt = nk.Adam(bundle.all_params(), lr=1e-3)
    with pytest.raises(ContractViolation, match="rewards"):
        joint_train_step(pools, bundle, data, config, opt)
    with pytest.raises(ContractViolation, match="batch"):
        joint_train_step([], bundle, data, config, opt)


def test_run_training_and_resume_bitwise(tiny_cohort, tmp_path):
    """Stage-boundary checkpoint + stateless seed chains: resuming from the
    stage-1 checkpoint replays stage 2 bit for bit."""
    config = _tiny_config()
    full_dir = tmp_path / "full"
    bundle_full, history_full, _ = run_training(tiny_cohort, config, out_dir=full_dir)

    stage1 = [r for r in history_full if r["stage"] == 1]
    stage2 = [r for r in history_full if r["stage"] == 2]
    assert len(stage1) == config.stage1_epochs
    assert len(stage2) == config.stage2_epochs
    assert all(r["L_cls"] is not None for r in stage2)

    resumed_dir = tmp_path / "resumed"
    bundle_res, history_res, _ = run_training(
        tiny_cohort, config, out_dir=resumed_dir,
        resume_from=full_dir / "stage1.ckpt",
    )
    assert [r for r in history_res if r["stage"] == 1] == []
    assert [r for r in history_res if r["stage"] == 2] == stage2
    for p_full, p_res in zip(bundle_full.all_params(), bundle_res.all_params()):
        assert np.array_equal(p_full.data, p_res.data)

    # the recorded history file parses back identically
    assert read_history(full_dir / "history.jsonl") == history_full


def test_history_round_trip(tmp_path):
    history = [
        {"stage": 1, "epoch": 0, "L_cls": None, "L_scr": 0.5, "mean_reward": -0.7},
        {"stage": 2, "epoch": 0, "L_cls": 1.1, "L_scr": 0.4, "mean_reward": -0.69},
    ]
    path = tmp_path / "history.jsonl"
    write_history(path, history)
    assert read_history(path) == history


def test_run_retrieval_deterministic(tiny_cohort):
    config = _tiny_config()
    data = prepare_training_data(tiny_cohort, config)
    bundle = init_bundle(
        len(tiny_cohort.roi_names), data.n_classes, data.n_features, config.seed
    )
    first, pools_a = run_retrieval(bundle, data, config, data.val_ids)
    second, pools_b = run_retrieval(bundle, data, config, data.val_ids)
    assert len(first) == data.val_ids.size
    for a, b in zip(first, second):
        assert np.array_equal(a.s_star, b.s_star)
        assert a.score == b.score
        assert np.array_equal(a.ensemble_sets, b.ensemble_sets)
    for pa, pb in zip(pools_a, pools_b):
        assert np.array_equal(pa.sets, pb.sets)
        assert np.array_equal(pa.scores, pb.scores)


def test_run_retrieval_subpool(tiny_cohort):
    config = _tiny_config(p0_size=35, pool_m=10)
    data = prepare_training_data(tiny_cohort, config)
    bundle = init_bundle(
        len(tiny_cohort.roi_names), data.n_classes, data.n_features, config.seed
    )
    subpool = np.arange(delta_start := 10, delta_start + 8)
    selections, _ = run_retrieval(bundle, data, config, data.val_ids[:3], subpool=subpool)
    for sel in selections:
        assert np.isin(sel.s_star, subpool).all()

"""Command-line surface for the evidence-set retrieval pipeline.

Commands: gen | extract | train | retrieve | eval | oracle | report |
export-plots. Exit codes: 0 success, 1 domain error (bad inputs, missing
files, contract violations), 2 usage error (argparse).

Config precedence, lowest to highest: built-in defaults, the config file
(--config, or the run directory's recorded config.toml for commands that
read a run), explicit CLI flags. Commands that read a trained run always
prepare cohort data with the run's own recorded config so splits and
normalization match training; flag overrides apply to the operation being
run (retrieval sampling, oracle audits), not to data preparation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cohort import (
    Cohort,
    draw_support_query,
    extract_features,
    generate_clone_cohort,
    generate_cohort,
    load_cohort,
    save_cohort,
)
from .config import RetrievalConfig, config_to_toml, load_config
from .errors import ContractViolation, FormatError, StrvError
from .evalkit import (
    baseline_all_radiomics,
    baseline_marginal_topk,
    baseline_random_sets,
    ensemble_predict,
    evaluate_retrieval,
    marginal_relevance,
    write_confusion_csv,
    write_predictions_csv,
    write_report_json,
)
from .model import ModelBundle, load_bundle, raw_view
from .radiomics import build_descriptors, export_descriptors_json
from .retrieval import (
    FINAL_CKPT,
    HISTORY_FILE,
    TrainingData,
    exhaustive_oracle,
    gap_statistics,
    prepare_training_data,
    read_history,
    run_retrieval,
    run_training,
    write_gap_csv,
)
from .setenc import encode_sets, token_outputs

TAG_ORACLE_DRAW = 41

CONFIG_FILE = "config.toml"
RUN_META_FILE = "run.json"
SELECTIONS_FILE = "selections.json"

# CLI flag attribute -> config field
_OVERRIDE_FIELDS = {
    "seed": "seed",
    "k": "k",
    "p0": "p0_size",
    "pool_m": "pool_m",
    "q": "q",
    "psteps": "probe_steps",
    "lambda_scr": "lambda_scr",
}


# ------------------------------------------------------------- plumbing


def _require(path: Path, what: str) -> Path:
    if not path.exists():
        raise FormatError(f"missing {what}: {path}")
    return path


def _overrides_from_args(args) -> dict:
    return {
        field: getattr(args, attr)
        for attr, field in _OVERRIDE_FIELDS.items()
        if getattr(args, attr, None) is not None
    }


def _config_from_args(args) -> RetrievalConfig:
    config = load_config(args.config) if args.config else RetrievalConfig()
    return dataclasses.replace(config, **_overrides_from_args(args))


@dataclass
class RunContext:
    """Everything a command that reads a trained run needs."""

    run_dir: Path
    run_config: RetrievalConfig  # as trained; governs data preparation
    op_config: RetrievalConfig  # run config + CLI overrides; governs the operation
    cohort: Cohort
    data: TrainingData
    bundle: ModelBundle


def _load_run_context(args) -> RunContext:
    run_dir = Path(args.run)
    config_path = Path(args.config) if args.config else _require(
        run_dir / CONFIG_FILE, "run config"
    )
    run_config = load_config(config_path)
    op_config = dataclasses.replace(run_config, **_overrides_from_args(args))
    cohort = load_cohort(args.cohort)
    data = prepare_training_data(cohort, run_config)
    bundle = load_bundle(_require(run_dir / FINAL_CKPT, "trained model checkpoint"))
    return RunContext(run_dir, run_config, op_config, cohort, data, bundle)


def _parse_dims(text: str) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"dims must look like DxHxW, got {text!r}")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be three integers, got {text!r}")
    if any(d < 4 for d in dims):
        raise argparse.ArgumentTypeError("every dimension must be >= 4")
    return dims


def _subject_index(token: str, data: TrainingData) -> int:
    if token in data.subject_names:
        return data.subject_names.index(token)
    try:
        index = int(token)
    except ValueError:
        raise ContractViolation(f"unknown subject {token!r}") from None
    if not 0 <= index < len(data.subject_names):
        raise ContractViolation(
            f"subject index {index} outside [0, {len(data.subject_names)})"
        )
    return index


def _parse_subjects(text: str, data: TrainingData) -> np.ndarray:
    if text == "val":
        return data.val_ids
    if text == "train":
        return data.train_ids
    if text == "all":
        return np.arange(len(data.subject_names), dtype=np.int64)
    return np.array([_subject_index(tok, data) for tok in text.split(",")], dtype=np.int64)


def _parse_subpool(text: str, data: TrainingData, config: RetrievalConfig) -> np.ndarray:
    """Either an integer count m (the m most relevant features by marginal
    single-feature reward) or an explicit comma-separated index list."""
    if "," in text:
        try:
            indices = np.array([int(tok) for tok in text.split(",")], dtype=np.int64)
        except ValueError:
            raise ContractViolation(
                f"subpool must be a count or comma-separated indices, got {text!r}"
            ) from None
        if np.unique(indices).size != indices.size:
            raise ContractViolation("subpool indices must be unique")
        indices = np.sort(indices)
    else:
        try:
            m = int(text)
        except ValueError:
            raise ContractViolation(
                f"subpool must be a count or comma-separated indices, got {text!r}"
            ) from None
        if not 0 < m <= data.n_features:
            raise ContractViolation(f"subpool size {m} outside [1, {data.n_features}]")
        relevance = marginal_relevance(data, config, config.seed)
        indices = np.sort(np.argsort(-relevance, kind="stable")[:m])
    if indices[0] < 0 or indices[-1] >= data.n_features:
        raise ContractViolation(f"subpool indices outside [0, {data.n_features})")
    return indices


def read_selections(path: str | Path) -> dict:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "subjects" not in payload:
        raise FormatError(f"{path}: not a selections file (no 'subjects' key)")
    return payload


def read_evidence(path: str | Path) -> dict:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "entries" not in payload:
        raise FormatError(f"{path}: not an evidence report (no 'entries' key)")
    return payload


def _print_metrics(name: str, report) -> None:
    auc = "nan" if math.isnan(report.auc_macro_ovr) else f"{report.auc_macro_ovr:.4f}"
    print(
        f"{name}: acc={report.accuracy:.4f} macro_f1={report.macro_f1:.4f} "
        f"bacc={report.balanced_accuracy:.4f} auc={auc} qwk={report.qwk:.4f}"
    )


# ------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    if args.clone:
        cohort = generate_clone_cohort(n_subjects=args.subjects, seed=args.seed)
    else:
        cohort = generate_cohort(args.subjects, args.dims, args.classes, seed=args.seed)
    save_cohort(cohort, args.out)
    kind = "clone" if args.clone else "planted"
    print(
        f"generated {kind} cohort: {cohort.n_subjects} subjects, dims {cohort.dims}, "
        f"{cohort.n_classes} classes -> {args.out}"
    )
    return 0


def cmd_extract(args) -> int:
    cohort = load_cohort(args.cohort)
    if cohort.features is not None and not args.force:
        raise ContractViolation(
            f"{args.cohort}: features already present (pass --force to recompute)"
        )
    extract_features(cohort, bin_count=args.bins)
    save_cohort(cohort, args.cohort)
    export_descriptors_json(
        Path(args.cohort) / "descriptors.json", build_descriptors(cohort.roi_names)
    )
    print(
        f"extracted {cohort.features.shape[1]} features for "
        f"{cohort.n_subjects} subjects -> {args.cohort}"
    )
    return 0


def cmd_train(args) -> int:
    cohort = load_cohort(args.cohort)
    config = _config_from_args(args)
    out = Path(args.out)
    bundle, history, data = run_training(
        cohort, config, out_dir=out, resume_from=args.resume
    )
    (out / CONFIG_FILE).write_text(config_to_toml(config))
    meta = {
        "cohort": str(Path(args.cohort).resolve()),
        "n_subjects": cohort.n_subjects,
        "n_features": data.n_features,
        "n_classes": data.n_classes,
        "roi_names": list(cohort.roi_names),
        "train_ids": [int(i) for i in data.train_ids],
        "val_ids": [int(i) for i in data.val_ids],
    }
    (out / RUN_META_FILE).write_text(json.dumps(meta, indent=1))
    last = history[-1]
    print(
        f"trained {len(history)} epochs: final L_cls={last['L_cls']:.4f} "
        f"L_scr={last['L_scr']:.4f} mean_reward={last['mean_reward']:.4f} -> {out}"
    )
    return 0


def cmd_retrieve(args) -> int:
    ctx = _load_run_context(args)
    indices = _parse_subjects(args.subjects, ctx.data)
    selections, pools = run_retrieval(ctx.bundle, ctx.data, ctx.op_config, indices)
    payload = {
        "seed": ctx.op_config.seed,
        "k": ctx.op_config.k,
        "subjects": [
            {
                "subject_id": ctx.data.subject_names[int(sel.subject_id)],
                "index": int(sel.subject_id),
                "label": int(ctx.data.labels[int(sel.subject_id)]),
                "s_star": [int(i) for i in sel.s_star],
                "score": float(sel.score),
                "ensemble_sets": [[int(i) for i in row] for row in sel.ensemble_sets],
                "pool_scores": [float(s) for s in pool.scores],
            }
            for sel, pool in zip(selections, pools)
        ],
    }
    out = Path(args.out) if args.out else ctx.run_dir / SELECTIONS_FILE
    out.write_text(json.dumps(payload))
    print(f"retrieved evidence sets for {len(selections)} subjects -> {out}")
    return 0


def cmd_eval(args) -> int:
    ctx = _load_run_context(args)
    out_dir = Path(args.out) if args.out else ctx.run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    report = evaluate_retrieval(ctx.bundle, ctx.data, ctx.op_config)
    write_report_json(out_dir / "eval_report.json", report)
    write_confusion_csv(out_dir / "confusion.csv", report)
    write_predictions_csv(out_dir / "predictions.csv", report)
    _print_metrics("retrieval", report)
    if args.baselines:
        seed = ctx.op_config.seed
        rs = baseline_random_sets(ctx.bundle, ctx.data, ctx.op_config, seed=seed)
        write_report_json(out_dir / "eval_random_sets.json", rs)
        _print_metrics("random_sets", rs)
        allrad = baseline_all_radiomics(ctx.data, ctx.op_config, seed=seed)
        write_report_json(out_dir / "eval_all_radiomics.json", allrad)
        _print_metrics("all_radiomics", allrad)
        marginal, indices = baseline_marginal_topk(ctx.data, ctx.op_config, seed=seed)
        write_report_json(out_dir / "eval_marginal_topk.json", marginal)
        (out_dir / "marginal_indices.json").write_text(
            json.dumps([int(i) for i in indices])
        )
        _print_metrics("marginal_topk", marginal)
    return 0


def cmd_oracle(args) -> int:
    ctx = _load_run_context(args)
    config = ctx.op_config
    subpool = _parse_subpool(args.subpool, ctx.data, config)
    total = math.comb(int(subpool.size), config.k)
    audit = dataclasses.replace(
        config,
        p0_size=min(config.p0_size, total),
        pool_m=min(config.pool_m, config.p0_size, total),
        q=min(config.q, config.pool_m, config.p0_size, total),
    )
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, TAG_ORACLE_DRAW]))
    support, query = draw_support_query(
        ctx.data.train_ids, ctx.data.labels, config.n_support, config.n_query, rng
    )
    oracle = exhaustive_oracle(
        subpool, config.k, support, query, ctx.data.features, ctx.data.labels,
        ctx.data.n_classes, probe_steps=config.probe_steps,
    )
    selections, _ = run_retrieval(
        ctx.bundle, ctx.data, audit, ctx.data.val_ids, subpool=subpool
    )
    rows, ranks = [], []
    for sel in selections:
        r_star = oracle.reward_of(sel.s_star)
        rows.append(
            {
                "subject_id": ctx.data.subject_names[int(sel.subject_id)],
                "r_star": r_star,
                "r_max": oracle.r_max,
                "gap": oracle.r_max - r_star,
            }
        )
        ranks.append(float((oracle.rewards > r_star).mean()))

    out_dir = Path(args.out) if args.out else ctx.run_dir / "oracle"
    out_dir.mkdir(parents=True, exist_ok=True)
    write_gap_csv(out_dir / "gaps.csv", rows)
    with open(out_dir / "enumerated_rewards.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"i{j}" for j in range(config.k)] + ["reward"])
        for indices, reward in zip(oracle.sets, oracle.rewards):
            writer.writerow([int(i) for i in indices] + [repr(float(reward))])
    stats = gap_statistics([row["gap"] for row in rows])
    summary = {
        "subpool": [int(i) for i in subpool],
        "k": config.k,
        "enumerated": int(total),
        "r_max": oracle.r_max,
        "mean_gap": stats.mean,
        "tail_integral": stats.tail_integral,
        "gap_percentiles": {str(p): v for p, v in stats.percentiles.items()},
        "subjects": [
            {"subject_id": row["subject_id"], "gap": row["gap"], "percentile_rank": rank}
            for row, rank in zip(rows, ranks)
        ],
    }
    (out_dir / "gap_stats.json").write_text(json.dumps(summary, indent=1))
    print(
        f"oracle: {total} sets enumerated over {subpool.size} indices (k={config.k}); "
        f"mean gap {stats.mean:.6f}, median percentile rank {np.median(ranks):.4f} -> {out_dir}"
    )
    return 0


def build_evidence_report(
    bundle: ModelBundle,
    data: TrainingData,
    cohort: Cohort,
    config: RetrievalConfig,
    selection,
) -> dict:
    """Per-subject explanation: the retrieved features with raw values,
    z-scores, and direction flags, plus per-region selection counts."""
    subject = int(selection.subject_id)
    out = token_outputs(data.features[subject], data.ids, raw_view(bundle.encoder))
    n_ens = min(config.ensemble_size, selection.ensemble_sets.shape[0])
    embeddings = encode_sets(out, selection.ensemble_sets[:n_ens])
    _, probs, pred = ensemble_predict(embeddings, raw_view(bundle.classifier))

    raw_row = cohort.features[subject]
    entries = []
    for idx in selection.s_star:
        idx = int(idx)
        d = data.descriptors[idx]
        z = float(data.features[subject, idx])
        direction = "high" if z > 1.0 else ("low" if z < -1.0 else "neutral")
        entries.append(
            {
                "feature_index": idx,
                "roi": d.roi,
                "family": d.family,
                "feature_name": d.name,
                "raw_value": float(raw_row[idx]),
                "z_score": z,
                "direction": direction,
            }
        )
    entries.sort(key=lambda e: (-abs(e["z_score"]), e["feature_index"]))
    entries = [{"rank": rank, **e} for rank, e in enumerate(entries, start=1)]
    roi_counts = {name: 0 for name in cohort.roi_names}
    for e in entries:
        roi_counts[e["roi"]] += 1
    return {
        "subject_id": data.subject_names[subject],
        "label": int(data.labels[subject]),
        "prediction": int(pred),
        "probabilities": [float(p) for p in probs],
        "k": int(config.k),
        "entries": entries,
        "roi_counts": roi_counts,
    }


def evidence_table(evidence: dict) -> str:
    """Aligned plain-text rendering of an evidence report."""
    header = ["rank", "roi", "family", "feature", "raw", "z", "direction"]
    rows = [
        [
            str(e["rank"]),
            e["roi"],
            e["family"],
            e["feature_name"],
            f"{e['raw_value']:.6g}",
            f"{e['z_score']:+.3f}",
            e["direction"],
        ]
        for e in evidence["entries"]
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(header)]
    right = {0, 4, 5}  # numeric columns

    def fmt(cells):
        return "  ".join(
            cell.rjust(widths[i]) if i in right else cell.ljust(widths[i])
            for i, cell in enumerate(cells)
        ).rstrip()

    probs = ", ".join(f"{p:.3f}" for p in evidence["probabilities"])
    lines = [
        f"subject {evidence['subject_id']}  label {evidence['label']}  "
        f"prediction {evidence['prediction']}  p=[{probs}]",
        fmt(header),
        fmt(["-" * w for w in widths]),
    ]
    lines.extend(fmt(row) for row in rows)
    counts = ", ".join(f"{roi}={c}" for roi, c in evidence["roi_counts"].items() if c)
    lines.append("")
    lines.append(f"selected features per region: {counts}")
    return "\n".join(lines)


def cmd_report(args) -> int:
    ctx = _load_run_context(args)
    index = _subject_index(args.subject, ctx.data)
    selections, _ = run_retrieval(ctx.bundle, ctx.data, ctx.op_config, [index])
    evidence = build_evidence_report(
        ctx.bundle, ctx.data, ctx.cohort, ctx.op_config, selections[0]
    )
    out = (
        Path(args.out)
        if args.out
        else ctx.run_dir / f"evidence_{evidence['subject_id']}.json"
    )
    out.write_text(json.dumps(evidence, indent=1))
    table = evidence_table(evidence)
    out.with_suffix(".txt").write_text(table + "\n")
    print(table)
    return 0


def cmd_export_plots(args) -> int:
    run_dir = Path(args.run)
    selections = read_selections(
        _require(run_dir / SELECTIONS_FILE, "selections (run `strv retrieve` first)")
    )
    history = read_history(_require(run_dir / HISTORY_FILE, "training history"))
    meta = json.loads(_require(run_dir / RUN_META_FILE, "run metadata").read_text())
    descriptors = build_descriptors(meta["roi_names"])
    roi_of = [d.roi for d in descriptors]
    out_dir = Path(args.out) if args.out else run_dir / "plots"
    out_dir.mkdir(parents=True, exist_ok=True)

    with open(out_dir / "score_histogram.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject_id", "bin_left", "bin_right", "count"])
        for rec in selections["subjects"]:
            scores = np.asarray(rec["pool_scores"], dtype=np.float64)
            counts, edges = np.histogram(scores, bins=30)
            for c, left, right in zip(counts, edges[:-1], edges[1:]):
                writer.writerow(
                    [rec["subject_id"], repr(float(left)), repr(float(right)), int(c)]
                )

    with open(out_dir / "score_top1.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject_id", "top1_score"])
        for rec in selections["subjects"]:
            writer.writerow([rec["subject_id"], repr(float(rec["score"]))])

    with open(out_dir / "roi_counts.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject_id", "roi", "count"])
        for rec in selections["subjects"]:
            counts = {name: 0 for name in meta["roi_names"]}
            for idx in rec["s_star"]:
                counts[roi_of[int(idx)]] += 1
            for name, count in counts.items():
                writer.writerow([rec["subject_id"], name, count])

    with open(out_dir / "training_curves.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "epoch", "L_cls", "L_scr", "mean_reward"])
        for rec in history:
            writer.writerow(
                [
                    rec["stage"],
                    rec["epoch"],
                    "" if rec["L_cls"] is None else repr(float(rec["L_cls"])),
                    repr(float(rec["L_scr"])),
                    repr(float(rec["mean_reward"])),
                ]
            )
    print(f"plot data -> {out_dir}")
    return 0


# --------------------------------------------------------------- parser


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--seed", type=int, help="random seed override")
    parser.add_argument("--k", type=int, help="evidence set size override")
    parser.add_argument("--p0", type=int, help="candidate sample size override")
    parser.add_argument("--pool-m", type=int, dest="pool_m", help="pool size override")
    parser.add_argument("--q", type=int, help="reward-supervised count override")
    parser.add_argument("--psteps", type=int, help="probe descent steps override")
    parser.add_argument(
        "--lambda-scr", type=float, dest="lambda_scr", help="score-loss weight override"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strv",
        description="Per-subject radiomic evidence-set retrieval: generate cohorts, "
        "extract features, train the retriever, and audit it against brute force.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic cohort")
    gen.add_argument("--out", required=True, help="cohort directory to create")
    gen.add_argument("--subjects", type=int, default=120)
    gen.add_argument("--dims", type=_parse_dims, default=(16, 32, 32), help="DxHxW")
    gen.add_argument("--classes", type=int, default=3)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument(
        "--clone",
        action="store_true",
        help="feature-space cohort with correlated clone features (2 classes)",
    )
    gen.set_defaults(func=cmd_gen)

    extract = sub.add_parser("extract", help="extract radiomic features")
    extract.add_argument("--cohort", required=True)
    extract.add_argument("--bins", type=int, default=32)
    extract.add_argument("--force", action="store_true", help="recompute existing features")
    extract.set_defaults(func=cmd_extract)

    train = sub.add_parser("train", help="run two-stage retrieval training")
    train.add_argument("--cohort", required=True)
    train.add_argument("--out", required=True, help="run directory to create")
    train.add_argument("--resume", help="stage-1 checkpoint to resume from")
    _add_config_flags(train)
    train.set_defaults(func=cmd_train)

    retrieve = sub.add_parser("retrieve", help="retrieve evidence sets per subject")
    retrieve.add_argument("--cohort", required=True)
    retrieve.add_argument("--run", required=True, help="trained run directory")
    retrieve.add_argument(
        "--subjects", default="val", help="val | train | all | comma-separated ids"
    )
    retrieve.add_argument("--out", help="selections JSON path (default: run dir)")
    _add_config_flags(retrieve)
    retrieve.set_defaults(func=cmd_retrieve)

    evaluate = sub.add_parser("eval", help="evaluate on the validation split")
    evaluate.add_argument("--cohort", required=True)
    evaluate.add_argument("--run", required=True)
    evaluate.add_argument(
        "--baselines", action="store_true", help="also run the comparison baselines"
    )
    evaluate.add_argument("--out", help="output directory (default: run dir)")
    _add_config_flags(evaluate)
    evaluate.set_defaults(func=cmd_eval)

    oracle = sub.add_parser("oracle", help="brute-force retrieval audit on a subpool")
    oracle.add_argument("--cohort", required=True)
    oracle.add_argument("--run", required=True)
    oracle.add_argument(
        "--subpool",
        required=True,
        help="feature count (top by marginal relevance) or comma-separated indices",
    )
    oracle.add_argument("--out", help="output directory (default: run dir /oracle)")
    _add_config_flags(oracle)
    oracle.set_defaults(func=cmd_oracle)

    report = sub.add_parser("report", help="per-subject evidence report")
    report.add_argument("--cohort", required=True)
    report.add_argument("--run", required=True)
    report.add_argument("--subject", required=True, help="subject id or index")
    report.add_argument("--out", help="evidence JSON path (default: run dir)")
    _add_config_flags(report)
    report.set_defaults(func=cmd_report)

    plots = sub.add_parser("export-plots", help="export plot-ready CSV data")
    plots.add_argument("--run", required=True)
    plots.add_argument("--out", help="output directory (default: run dir /plots)")
    plots.set_defaults(func=cmd_export_plots)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StrvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

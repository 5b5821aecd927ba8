"""Two-stage feature-set retrieval: sampling, pools, training, oracles."""

from .oracle import (
    ENUMERATION_BUDGET,
    GapStats,
    OracleResult,
    empirical_tail_integral,
    enumerate_subsets,
    exhaustive_oracle,
    gap_statistics,
    read_gap_csv,
    write_gap_csv,
)
from .pools import CandidatePool, SelectionResult, build_pool, select_top1
from .sampling import raw_sample_sets, sample_sets
from .training import (
    FINAL_CKPT,
    HISTORY_FILE,
    STAGE1_CKPT,
    TrainingData,
    joint_train_step,
    prepare_training_data,
    read_history,
    run_retrieval,
    run_training,
    stage1_train,
    stage2_train,
    write_history,
)

__all__ = [
    "ENUMERATION_BUDGET",
    "GapStats",
    "OracleResult",
    "empirical_tail_integral",
    "enumerate_subsets",
    "exhaustive_oracle",
    "gap_statistics",
    "read_gap_csv",
    "write_gap_csv",
    "CandidatePool",
    "SelectionResult",
    "build_pool",
    "select_top1",
    "raw_sample_sets",
    "sample_sets",
    "FINAL_CKPT",
    "HISTORY_FILE",
    "STAGE1_CKPT",
    "TrainingData",
    "joint_train_step",
    "prepare_training_data",
    "read_history",
    "run_retrieval",
    "run_training",
    "stage1_train",
    "stage2_train",
    "write_history",
]

from .config import (
    ACTIVATION_OPTIONS,
    CHAMPION,
    HEAD_OPTIONS,
    LOOK_BACK_OPTIONS,
    N_SPATIAL,
    RNN_LAYER_OPTIONS,
    RNN_UNIT_OPTIONS,
    SPATIAL_LAYER_OPTIONS,
    SPATIAL_UNIT_OPTIONS,
    ArchConfig,
    TrainConfig,
    parse_arch_config,
)
from .folds import (
    FoldData,
    FoldJob,
    FoldOutcome,
    fit_fold,
    prepare_fold,
    run_fold_job,
    run_fold_jobs,
)
from .network import ForwardTape, TwoBranchModel, build_model
from .training import EpochRecord, TrainedModel, predict, train

__all__ = [
    "ACTIVATION_OPTIONS",
    "CHAMPION",
    "HEAD_OPTIONS",
    "LOOK_BACK_OPTIONS",
    "N_SPATIAL",
    "RNN_LAYER_OPTIONS",
    "RNN_UNIT_OPTIONS",
    "SPATIAL_LAYER_OPTIONS",
    "SPATIAL_UNIT_OPTIONS",
    "ArchConfig",
    "EpochRecord",
    "FoldData",
    "FoldJob",
    "FoldOutcome",
    "ForwardTape",
    "TrainConfig",
    "TrainedModel",
    "TwoBranchModel",
    "build_model",
    "fit_fold",
    "parse_arch_config",
    "predict",
    "prepare_fold",
    "run_fold_job",
    "run_fold_jobs",
    "train",
]

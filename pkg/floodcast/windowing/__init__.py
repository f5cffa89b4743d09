from .samples import (
    INDEX_COLUMNS,
    SampleBatch,
    build_batches,
    build_samples,
    merge_batches,
)
from .splits import Fold, SplitPlan, loeo_splits, plan_for_events

__all__ = [
    "Fold",
    "INDEX_COLUMNS",
    "SampleBatch",
    "SplitPlan",
    "build_batches",
    "build_samples",
    "loeo_splits",
    "merge_batches",
    "plan_for_events",
]

from .baselines import BASELINES, baseline_predictors
from .correlation import (
    CORRELATION_LABELS,
    correlation_matrix,
    correlation_shift,
    split_correlations,
)
from .metrics import (
    EventScore,
    FoldScores,
    MetricsReport,
    compute_metrics,
    evaluate_protocol,
    score_events,
    variant_name,
)
from .report import (
    FOLD_COLUMNS,
    FOLDS_FILE,
    FULL_REPORT_COLUMNS,
    REPORT_COLUMNS,
    REPORT_FILE,
    aggregate_from_folds,
    fold_frame,
    report_frame,
    write_report,
)
from .variants import (
    base_variant,
    load_fold_models,
    model_path,
    run_variant_study,
    scaled_test_batches,
    variant_configs,
)

__all__ = [
    "BASELINES",
    "CORRELATION_LABELS",
    "FOLDS_FILE",
    "FOLD_COLUMNS",
    "FULL_REPORT_COLUMNS",
    "REPORT_COLUMNS",
    "REPORT_FILE",
    "EventScore",
    "FoldScores",
    "MetricsReport",
    "aggregate_from_folds",
    "base_variant",
    "baseline_predictors",
    "compute_metrics",
    "correlation_matrix",
    "correlation_shift",
    "evaluate_protocol",
    "fold_frame",
    "load_fold_models",
    "model_path",
    "report_frame",
    "run_variant_study",
    "scaled_test_batches",
    "score_events",
    "split_correlations",
    "variant_configs",
    "variant_name",
    "write_report",
]

"""CSV renderings of metrics reports.

``report.csv`` has one row per variant. ``report_folds.csv`` keeps every
per-fold, per-event score so the aggregates can be recomputed.
"""
import logging
import math
from pathlib import Path
from typing import List, Literal, Sequence, Tuple, Union

import pandas as pd

from floodcast.errors import EmptyInputError, IoFailureError, SchemaMismatchError

from .metrics import MetricsReport

logger = logging.getLogger(__name__)

REPORT_FILE = "report.csv"
FOLDS_FILE = "report_folds.csv"
REPORT_COLUMNS = ["variant", "rnn_type", "max15", "look_back", "mae_m", "rmse_m"]
FULL_REPORT_COLUMNS = [
    "variant",
    "rnn_type",
    "max15",
    "sample_weight",
    "look_back",
    "mae_m",
    "rmse_m",
]
FOLD_COLUMNS = [
    "variant",
    "fold",
    "event_id",
    "mae_m",
    "rmse_m",
    "n_samples",
    "pooled",
]

Layout = Literal["mini", "full"]


def _flag(value: object) -> str:
    if value is None:
        return "n/a"
    return "Y" if value else "N"


def report_frame(
    reports: Sequence[MetricsReport], layout: Layout = "mini"
) -> pd.DataFrame:
    if not reports:
        raise EmptyInputError("no report rows")
    rows = [
        {
            "variant": r.variant,
            "rnn_type": r.rnn_type,
            "max15": _flag(r.include_max15),
            # sample weighting is never used
            "sample_weight": "N",
            "look_back": r.look_back,
            "mae_m": r.mae_m,
            "rmse_m": r.rmse_m,
        }
        for r in reports
    ]
    columns = FULL_REPORT_COLUMNS if layout == "full" else REPORT_COLUMNS
    return pd.DataFrame(rows)[columns]


def fold_frame(reports: Sequence[MetricsReport]) -> pd.DataFrame:
    rows = [
        {
            "variant": r.variant,
            "fold": fold.fold,
            "event_id": event.event_id,
            "mae_m": event.mae_m,
            "rmse_m": event.rmse_m,
            "n_samples": event.n_samples,
            "pooled": r.pooled,
        }
        for r in reports
        for fold in r.folds
        for event in fold.events
    ]
    return pd.DataFrame(rows, columns=FOLD_COLUMNS)


def _fold_aggregate(rows: pd.DataFrame) -> Tuple[float, float]:
    if not bool(rows["pooled"].iloc[0]):
        return float(rows["mae_m"].mean()), float(rows["rmse_m"].mean())
    n = rows["n_samples"].to_numpy(dtype=float)
    mae = rows["mae_m"].to_numpy(dtype=float)
    rmse = rows["rmse_m"].to_numpy(dtype=float)
    return (
        float((n * mae).sum() / n.sum()),
        math.sqrt(float((n * rmse**2).sum() / n.sum())),
    )


def aggregate_from_folds(folds: pd.DataFrame) -> pd.DataFrame:
    """Per variant aggregates rebuilt from ``report_folds.csv`` rows.

    Rows flagged ``pooled`` are weighted by ``n_samples`` within their fold.
    """
    missing = set(FOLD_COLUMNS) - set(folds.columns)
    if missing:
        raise SchemaMismatchError(f"fold report lacks columns {sorted(missing)}")
    per_fold = pd.DataFrame(
        [
            {"variant": variant, "mae_m": mae, "rmse_m": rmse}
            for (variant, _), rows in folds.groupby(["variant", "fold"], sort=False)
            for mae, rmse in [_fold_aggregate(rows)]
        ],
        columns=["variant", "mae_m", "rmse_m"],
    )
    return per_fold.groupby("variant", sort=False).mean().reset_index()


def write_report(
    reports: Sequence[MetricsReport],
    out_dir: Union[str, Path],
    layout: Layout = "mini",
) -> List[Path]:
    out_dir = Path(out_dir)
    paths = [out_dir / REPORT_FILE, out_dir / FOLDS_FILE]
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        report_frame(reports, layout).to_csv(paths[0], index=False)
        fold_frame(reports).to_csv(paths[1], index=False)
    except OSError as e:
        raise IoFailureError(f"cannot write the report to {out_dir}: {e}") from e
    logger.info("Report of %d variants written to %s", len(reports), out_dir)
    return paths

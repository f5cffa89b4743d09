import logging
from pathlib import Path
from typing import (
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Union,
)

import pandas as pd

from floodcast.errors import EmptyLogError, IoFailureError
from floodcast.eval import score_events
from floodcast.features import EventFeatureTable
from floodcast.model import (
    ArchConfig,
    FoldJob,
    FoldOutcome,
    TrainConfig,
    run_fold_jobs,
)
from floodcast.windowing import SplitPlan

from .grid import GridSpec, enumerate_grid, run_id
from .run_log import FoldRecord, RunLogStore, RunRecord

logger = logging.getLogger(__name__)

TOP_RUNS_FILE = "top_runs.csv"
DISTRIBUTION_FILE = "mae_distribution.csv"
EXPORT_COLUMNS = [
    "run_id",
    "rnn_type",
    "rnn_layers",
    "rnn_units",
    "spatial_layers",
    "spatial_units",
    "spatial_act",
    "head_units",
    "head_act",
    "look_back",
    "max15",
    "mae_m",
    "rmse_m",
]
DISTRIBUTION_GROUPS = ("spatial_layers", "head_layers")


def _record(
    rid: str, config: ArchConfig, tc: TrainConfig, outcomes: List[FoldOutcome]
) -> RunRecord:
    wall_time = sum(o.wall_time_s for o in outcomes)
    common = dict(
        run_id=rid,
        config=config,
        seed=tc.seed,
        n_params=config.parameter_count(),
        wall_time_s=wall_time,
    )
    failed = [o for o in outcomes if o.trained is None]
    if failed:
        first = failed[0]
        error = {"fold": first.job.fold.name, **(first.error or {})}
        return RunRecord(status="failed", error=error, **common)
    folds = []
    for outcome in outcomes:
        trained = outcome.trained
        assert trained is not None
        folds.append(
            FoldRecord(
                fold=outcome.job.fold.index,
                validation_event_id=outcome.job.fold.validation_event_id,
                events=score_events(trained, outcome.tests),
                val_mae=trained.best_val_mae,
                best_epoch=trained.best_epoch,
            )
        )
    record = RunRecord(status="ok", folds=folds, **common)
    mae, rmse = record.recompute()
    return record.model_copy(update={"mae_m": mae, "rmse_m": rmse})


def run_search(
    grid: Union[GridSpec, Sequence[ArchConfig]],
    tables: Mapping[str, EventFeatureTable],
    plan: SplitPlan,
    log: RunLogStore,
    tc: Optional[TrainConfig] = None,
    workers: int = 1,
    retry_failed: bool = False,
) -> Iterator[RunRecord]:
    """Train every configuration on every fold and append one record per run.

    Runs already in ``log`` are skipped, failed ones too unless
    ``retry_failed``. Records are appended in grid order whatever ``workers``.
    """
    tc = tc or TrainConfig()
    configs = enumerate_grid(grid) if isinstance(grid, GridSpec) else list(grid)
    logged = {r.run_id: r for r in log.records()}
    pending: Dict[str, ArchConfig] = {}
    for config in configs:
        rid = run_id(config, tc, plan)
        previous = logged.get(rid)
        if previous is not None and (previous.ok or not retry_failed):
            continue
        pending.setdefault(rid, config)
    logger.info(
        "%d of %d runs to do, %d folds each",
        len(pending),
        len(configs),
        len(plan.folds),
    )
    jobs = [
        FoldJob(rid, config, fold, tuple(plan.test_event_ids), tc)
        for rid, config in pending.items()
        for fold in plan.folds
    ]
    outcomes: List[FoldOutcome] = []
    for outcome in run_fold_jobs(jobs, tables, workers):
        outcomes.append(outcome)
        if len(outcomes) < len(plan.folds):
            continue
        rid = outcome.job.key
        record = _record(rid, pending[rid], tc, outcomes)
        outcomes = []
        log.append(record)
        if record.ok:
            logger.info("Run %s: MAE %.5f m", rid, record.mae_m)
        else:
            logger.warning("Run %s failed: %s", rid, record.error)
        yield record


def select_champion(records: Union[RunLogStore, Iterable[RunRecord]]) -> RunRecord:
    """Lowest MAE, then lowest RMSE, fewest parameters and run id."""
    if isinstance(records, RunLogStore):
        records = records.records()
    ok = [r for r in records if r.ok]
    if not ok:
        raise EmptyLogError("no successful run in the log")
    return min(ok, key=_rank)


def _rank(record: RunRecord) -> tuple:
    return (record.mae_m, record.rmse_m, record.n_params, record.run_id)


def _joined(values: Union[str, Sequence[object]]) -> str:
    return values if isinstance(values, str) else "-".join(str(v) for v in values)


def runs_frame(records: Iterable[RunRecord]) -> pd.DataFrame:
    """Successful runs, best first."""
    rows = []
    for record in sorted((r for r in records if r.ok), key=_rank):
        c = record.config
        rows.append(
            {
                "run_id": record.run_id,
                "rnn_type": c.rnn_type,
                "rnn_layers": c.rnn_layers,
                "rnn_units": c.rnn_units,
                "spatial_layers": c.spatial_layers,
                "spatial_units": c.spatial_units,
                "spatial_act": c.spatial_act,
                "head_units": _joined(c.head_units),
                "head_act": _joined(c.head_act),
                "look_back": c.look_back,
                "max15": "Y" if c.include_max15 else "N",
                "mae_m": record.mae_m,
                "rmse_m": record.rmse_m,
                "head_layers": c.head_layers,
            }
        )
    return pd.DataFrame(rows, columns=EXPORT_COLUMNS + ["head_layers"])


def mae_distribution(runs: pd.DataFrame) -> pd.DataFrame:
    """MAE summary per recurrent depth and spatial or head depth."""
    parts = []
    for group in DISTRIBUTION_GROUPS:
        stats = (
            runs.groupby(["rnn_layers", group])["mae_m"]
            .describe()
            .reset_index()
            .rename(columns={group: "layers"})
        )
        stats.insert(0, "grouping", group)
        parts.append(stats)
    return pd.concat(parts, ignore_index=True)


def export_runs(
    records: Union[RunLogStore, Iterable[RunRecord]],
    out_dir: Union[str, Path],
    k: int = 120,
) -> List[Path]:
    """Top-``k`` runs for parallel-coordinates plots and the MAE distributions."""
    if isinstance(records, RunLogStore):
        records = records.records()
    runs = runs_frame(records)
    if runs.empty:
        raise EmptyLogError("no successful run to export")
    out_dir = Path(out_dir)
    paths = [out_dir / TOP_RUNS_FILE, out_dir / DISTRIBUTION_FILE]
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        runs.head(k)[EXPORT_COLUMNS].to_csv(paths[0], index=False)
        mae_distribution(runs).to_csv(paths[1], index=False)
    except OSError as e:
        raise IoFailureError(f"cannot export runs to {out_dir}: {e}") from e
    logger.info("Exported %d of %d runs to %s", min(k, len(runs)), len(runs), out_dir)
    return paths

"""Reference predictors scored under the same protocol as the networks.

Every baseline sees exactly the samples a look-back ``L`` model sees: the
first ``L`` hours of each event are skipped.
"""
from typing import Callable, Dict, List, Mapping

import numpy as np

from floodcast.errors import EmptyInputError
from floodcast.features import TARGET_COLUMN, EventFeatureTable
from floodcast.windowing import SplitPlan

from .metrics import EventScore, FoldScores, MetricsReport, compute_metrics

BASELINES = ("zero", "train-mean", "persistence")


def _targets(table: EventFeatureTable, look_back: int) -> np.ndarray:
    table.require([TARGET_COLUMN])
    return table.grid(TARGET_COLUMN)[:, look_back:].reshape(-1)


def _persistence(table: EventFeatureTable, look_back: int) -> np.ndarray:
    """The depth one hour earlier, in sample order."""
    return table.grid(TARGET_COLUMN)[:, look_back - 1 : -1].reshape(-1)


def baseline_predictors(
    tables: Mapping[str, EventFeatureTable],
    plan: SplitPlan,
    look_back: int = 4,
    pooled: bool = False,
) -> List[MetricsReport]:
    """Zero-depth, train-mean and persistence reports over the rotation.

    The train-mean predictor of a fold is the mean depth of that fold's
    training samples. ``pooled`` aggregates like ``evaluate_protocol``.
    """
    tests = [e for e in plan.test_event_ids if e in tables]
    tests = [e for e in tests if tables[e].n_hours > look_back]
    if not tests:
        raise EmptyInputError("no test event is long enough to score")
    targets = {e: _targets(tables[e], look_back) for e in tests}
    reports = []
    for name in BASELINES:
        folds = []
        for fold in plan.folds:
            predictor = _predictor(name, tables, fold.train_event_ids, look_back)
            events = []
            for event_id in tests:
                mae, rmse = compute_metrics(
                    predictor(tables[event_id]), targets[event_id]
                )
                events.append(
                    EventScore(
                        event_id=event_id,
                        mae_m=mae,
                        rmse_m=rmse,
                        n_samples=targets[event_id].size,
                    )
                )
            folds.append(
                FoldScores(
                    fold=fold.index,
                    validation_event_id=fold.validation_event_id,
                    events=events,
                )
            )
        reports.append(
            MetricsReport(
                variant=name, look_back=look_back, folds=folds, pooled=pooled
            )
        )
    return reports


def _predictor(
    name: str,
    tables: Mapping[str, EventFeatureTable],
    train_event_ids: List[str],
    look_back: int,
) -> Callable[[EventFeatureTable], np.ndarray]:
    if name == "zero":
        return lambda table: np.zeros(table.grid(TARGET_COLUMN)[:, look_back:].size)
    if name == "persistence":
        return lambda table: _persistence(table, look_back)
    train: Dict[str, np.ndarray] = {
        e: _targets(tables[e], look_back)
        for e in train_event_ids
        if e in tables and tables[e].n_hours > look_back
    }
    if not train:
        raise EmptyInputError("no training samples for the mean predictor")
    mean = float(np.concatenate(list(train.values())).mean())
    return lambda table: np.full(table.grid(TARGET_COLUMN)[:, look_back:].size, mean)

"""One fold of the leave-one-event-out rotation, from raw tables to a model."""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple

from floodcast.errors import FloodcastError, UnknownEventError
from floodcast.features import (
    ALL_FEATURES,
    EventFeatureTable,
    Scaler,
    apply_scaler,
    fit_scaler,
)
from floodcast.windowing import Fold, SampleBatch, build_samples, merge_batches

from .config import ArchConfig, TrainConfig
from .network import build_model
from .training import TrainedModel, train

logger = logging.getLogger(__name__)


@dataclass
class FoldData:
    fold: Fold
    scaler: Scaler
    train: SampleBatch
    validation: SampleBatch
    tests: Dict[str, SampleBatch]


def prepare_fold(
    tables: Mapping[str, EventFeatureTable],
    fold: Fold,
    test_event_ids: Sequence[str],
    look_back: int,
    include_max15: bool,
) -> FoldData:
    """Fit the scaler on the fold's training events only and window everything.

    The validation and test events are scaled with that scaler, never fitted on.
    """
    needed = [*fold.train_event_ids, fold.validation_event_id, *test_event_ids]
    missing = [e for e in needed if e not in tables]
    if missing:
        raise UnknownEventError(f"no feature table for events {missing}")
    scaler = fit_scaler([tables[e] for e in fold.train_event_ids], ALL_FEATURES)
    batches = {
        e: build_samples(apply_scaler(scaler, tables[e]), look_back, include_max15)
        for e in dict.fromkeys(needed)
    }
    return FoldData(
        fold=fold,
        scaler=scaler,
        train=merge_batches(batches, fold.train_event_ids),
        validation=batches[fold.validation_event_id],
        tests={e: batches[e] for e in test_event_ids},
    )


def fit_fold(
    config: ArchConfig,
    data: FoldData,
    tc: Optional[TrainConfig] = None,
) -> TrainedModel:
    """Train a fresh ``config`` model on one prepared fold."""
    tc = tc or TrainConfig()
    model = build_model(config, seed=tc.seed, reg=tc.reg)
    trained = train(model, data.train, data.validation, tc, scaler=data.scaler)
    logger.debug(
        "%s: best epoch %d, validation MAE %.5f m",
        data.fold.name,
        trained.best_epoch,
        trained.best_val_mae,
    )
    return trained


@dataclass(frozen=True)
class FoldJob:
    """Train ``config`` on one fold; ``key`` is the caller's handle."""

    key: str
    config: ArchConfig
    fold: Fold
    test_event_ids: Tuple[str, ...]
    tc: TrainConfig = TrainConfig()


@dataclass
class FoldOutcome:
    job: FoldJob
    trained: Optional[TrainedModel]
    tests: Dict[str, SampleBatch]
    error: Optional[Dict[str, str]]
    wall_time_s: float

    @property
    def ok(self) -> bool:
        return self.trained is not None


def run_fold_job(
    job: FoldJob, tables: Mapping[str, EventFeatureTable]
) -> FoldOutcome:
    """Prepare and train one fold, capturing domain errors in the outcome."""
    start = time.perf_counter()
    try:
        data = prepare_fold(
            tables,
            job.fold,
            job.test_event_ids,
            job.config.look_back,
            job.config.include_max15,
        )
        trained = fit_fold(job.config, data, job.tc)
    except FloodcastError as e:
        logger.warning("%s %s failed: %s", job.key, job.fold.name, e)
        return FoldOutcome(job, None, {}, e.to_dict(), time.perf_counter() - start)
    return FoldOutcome(
        job, trained, data.tests, None, time.perf_counter() - start
    )


def run_fold_jobs(
    jobs: Sequence[FoldJob],
    tables: Mapping[str, EventFeatureTable],
    workers: int = 1,
) -> Iterator[FoldOutcome]:
    """Outcomes in job order, whatever the number of worker processes."""
    run = partial(run_fold_job, tables=dict(tables))
    if workers <= 1:
        yield from map(run, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as executor:
        yield from executor.map(run, jobs)

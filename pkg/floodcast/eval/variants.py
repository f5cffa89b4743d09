"""The eight recurrent variants of one architecture over the full rotation.

Fold models are cached as ``<models_dir>/<variant>/<fold>.json``; only the
missing ones are trained.
"""
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from floodcast.data_store import RainfallEvent
from floodcast.errors import MissingFoldModelError
from floodcast.features import EventFeatureTable, apply_scaler
from floodcast.model import (
    CHAMPION,
    ArchConfig,
    FoldJob,
    TrainConfig,
    TrainedModel,
    run_fold_jobs,
)
from floodcast.windowing import SampleBatch, SplitPlan, build_samples, plan_for_events

from .metrics import MetricsReport, evaluate_protocol, variant_name

logger = logging.getLogger(__name__)

RNN_TYPES = ("LSTM", "GRU")
MAX15_FLAGS = (True, False)
LOOK_BACKS = (1, 4)


def variant_configs(base: ArchConfig = CHAMPION) -> List[Tuple[str, ArchConfig]]:
    """``base`` under every cell type, MAX15 flag and look-back."""
    return [
        (
            variant_name(rnn_type, max15, look_back),
            base.with_variant(rnn_type, max15, look_back),
        )
        for rnn_type in RNN_TYPES
        for max15 in MAX15_FLAGS
        for look_back in LOOK_BACKS
    ]


def base_variant(config: ArchConfig) -> str:
    return variant_name(config.rnn_type, config.include_max15, config.look_back)


def model_path(models_dir: Union[str, Path], variant: str, fold_name: str) -> Path:
    return Path(models_dir) / variant / f"{fold_name}.json"


def scaled_test_batches(
    trained: TrainedModel,
    tables: Mapping[str, EventFeatureTable],
    test_event_ids: Sequence[str],
) -> Dict[str, SampleBatch]:
    """The test events windowed and scaled for ``trained``."""
    if trained.scaler is None:
        raise MissingFoldModelError("the fold model carries no scaler")
    config = trained.config
    return {
        e: build_samples(
            apply_scaler(trained.scaler, tables[e]),
            config.look_back,
            config.include_max15,
        )
        for e in test_event_ids
    }


def load_fold_models(
    models_dir: Union[str, Path], variant: str, plan: SplitPlan
) -> Dict[str, TrainedModel]:
    """The cached models of ``variant``, keyed by validation event."""
    models = {}
    for fold in plan.folds:
        path = model_path(models_dir, variant, fold.name)
        if path.is_file():
            models[fold.validation_event_id] = TrainedModel.load(path)
    return models


def run_variant_study(
    tables: Mapping[str, EventFeatureTable],
    events: Sequence[RainfallEvent],
    base: ArchConfig = CHAMPION,
    tc: Optional[TrainConfig] = None,
    models_dir: Optional[Union[str, Path]] = None,
    workers: int = 1,
    pooled: bool = False,
    train_missing: bool = True,
    all_variants: bool = True,
) -> List[MetricsReport]:
    """Report of every variant of ``base``, training the fold models it lacks.

    Without ``all_variants`` only ``base`` itself is reported. Without
    ``train_missing`` a variant missing any fold model is skipped.
    """
    tc = tc or TrainConfig()
    variants = variant_configs(base) if all_variants else [(base_variant(base), base)]
    plans = {name: plan_for_events(events, c.look_back) for name, c in variants}
    models: Dict[str, Dict[str, TrainedModel]] = {
        name: load_fold_models(models_dir, name, plans[name]) if models_dir else {}
        for name, _ in variants
    }
    jobs = [
        FoldJob(name, config, fold, tuple(plans[name].test_event_ids), tc)
        for name, config in variants
        for fold in plans[name].folds
        if train_missing and fold.validation_event_id not in models[name]
    ]
    if jobs:
        logger.info("Training %d missing fold models", len(jobs))
    for outcome in run_fold_jobs(jobs, tables, workers):
        if outcome.trained is None:
            continue
        fold = outcome.job.fold
        models[outcome.job.key][fold.validation_event_id] = outcome.trained
        if models_dir:
            outcome.trained.save(model_path(models_dir, outcome.job.key, fold.name))

    reports = []
    for name, _ in variants:
        plan = plans[name]
        if len(models[name]) < len(plan.folds):
            logger.warning("Variant %s lacks fold models, left out", name)
            continue
        tests = {
            v: scaled_test_batches(m, tables, plan.test_event_ids)
            for v, m in models[name].items()
        }
        reports.append(
            evaluate_protocol(plan, models[name], tests, variant=name, pooled=pooled)
        )
    return reports

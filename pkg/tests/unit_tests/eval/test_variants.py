from pathlib import Path
from typing import Dict

from pytest_mock import MockerFixture

from floodcast.data_store import FloodDataset
from floodcast.eval import (
    base_variant,
    load_fold_models,
    model_path,
    run_variant_study,
    variant_configs,
    variants,
)
from floodcast.features import EventFeatureTable
from floodcast.model import CHAMPION, ArchConfig, TrainConfig
from floodcast.windowing import SplitPlan


def test_eight_variants() -> None:
    variants = variant_configs()
    assert len(variants) == 8
    assert len({name for name, _ in variants}) == 8
    assert ("GRU-max15-L4", CHAMPION) in variants
    for _, config in variants:
        assert config.head_units == CHAMPION.head_units
        assert config.rnn_units == CHAMPION.rnn_units
    assert base_variant(CHAMPION) == "GRU-max15-L4"


def test_model_path(tmp_path: Path) -> None:
    path = model_path(tmp_path, "LSTM-nomax15-L1", "fold03-E04")
    assert path == tmp_path / "LSTM-nomax15-L1" / "fold03-E04.json"


def test_study_trains_once_and_reuses_cache(
    tmp_path: Path,
    mocker: MockerFixture,
    small_dataset: FloodDataset,
    tables: Dict[str, EventFeatureTable],
    plan: SplitPlan,
    small_arch: ArchConfig,
    quick_train: TrainConfig,
) -> None:
    spy = mocker.spy(variants, "run_fold_jobs")
    reports = run_variant_study(
        tables,
        small_dataset.events,
        base=small_arch,
        tc=quick_train,
        models_dir=tmp_path,
        all_variants=False,
    )
    assert [r.variant for r in reports] == ["GRU-max15-L4"]
    assert len(spy.call_args_list[0].args[0]) == len(plan.folds)
    cached = load_fold_models(tmp_path, "GRU-max15-L4", plan)
    assert set(cached) == set(plan.train_event_ids)

    again = run_variant_study(
        tables,
        small_dataset.events,
        base=small_arch,
        tc=quick_train,
        models_dir=tmp_path,
        all_variants=False,
    )
    assert spy.call_args_list[1].args[0] == []
    assert again[0].mae_m == reports[0].mae_m


def test_study_without_training_skips_incomplete_variants(
    tmp_path: Path,
    small_dataset: FloodDataset,
    tables: Dict[str, EventFeatureTable],
    small_arch: ArchConfig,
) -> None:
    reports = run_variant_study(
        tables,
        small_dataset.events,
        base=small_arch,
        models_dir=tmp_path,
        train_missing=False,
    )
    assert reports == []

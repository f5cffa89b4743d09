from dataclasses import replace
from pathlib import Path
from typing import Dict

import numpy as np
import pytest
from pytest_mock import MockerFixture

from floodcast.errors import (
    EmptyBatchError,
    InvalidConfigError,
    MissingFileError,
    NonFiniteLossError,
    ScalerMismatchError,
    ShapeMismatchError,
)
from floodcast.features import EventFeatureTable
from floodcast.model import (
    ArchConfig,
    FoldData,
    FoldJob,
    TrainConfig,
    TrainedModel,
    build_model,
    fit_fold,
    predict,
    prepare_fold,
    run_fold_jobs,
    train,
)
from floodcast.windowing import SplitPlan


@pytest.fixture
def fold_data(
    tables: Dict[str, EventFeatureTable], plan: SplitPlan, small_arch: ArchConfig
) -> FoldData:
    return prepare_fold(
        tables,
        plan.folds[0],
        plan.test_event_ids,
        small_arch.look_back,
        small_arch.include_max15,
    )


def test_prepare_fold_scales_on_training_events_only(
    tables: Dict[str, EventFeatureTable], plan: SplitPlan, fold_data: FoldData
) -> None:
    fold = plan.folds[0]
    rh = np.concatenate(
        [tables[e].frame["rh_mm"].to_numpy() for e in fold.train_event_ids]
    )
    assert fold_data.scaler.mean[fold_data.scaler.features[0]] == pytest.approx(
        rh.mean()
    )
    assert fold_data.train.scaler_digest == fold_data.scaler.digest
    assert fold_data.validation.event_ids == [fold.validation_event_id]
    assert set(fold_data.tests) == set(plan.test_event_ids)
    n_train = sum((tables[e].n_hours - 4) * 6 for e in fold.train_event_ids)
    assert len(fold_data.train) == n_train


def test_train_restores_best_epoch(
    small_arch: ArchConfig, quick_train: TrainConfig, fold_data: FoldData
) -> None:
    trained = fit_fold(small_arch, fold_data, quick_train)
    assert 1 <= len(trained.history) <= quick_train.max_epochs
    best = min(trained.history, key=lambda h: h.val_mae)
    assert trained.best_epoch == best.epoch
    assert trained.best_val_mae == best.val_mae
    pred = predict(trained, fold_data.validation)
    targets = fold_data.validation.require_targets()
    assert float(np.abs(pred - targets).mean()) == pytest.approx(best.val_mae)
    assert trained.scaler_digest == fold_data.scaler.digest


def test_training_is_deterministic(
    small_arch: ArchConfig, quick_train: TrainConfig, fold_data: FoldData
) -> None:
    a = fit_fold(small_arch, fold_data, quick_train)
    b = fit_fold(small_arch, fold_data, quick_train)
    assert a.history == b.history
    params_a, params_b = a.model.parameters(), b.model.parameters()
    assert all(np.array_equal(params_a[k], params_b[k]) for k in params_a)


def test_early_stopping(
    small_arch: ArchConfig, fold_data: FoldData, mocker: MockerFixture
) -> None:
    val_maes = iter([0.5, 0.4, 0.45, 0.46, 0.47, 0.3])

    def scripted(model: object, batch: object) -> float:
        return next(val_maes) if batch is fold_data.validation else 0.1

    mocker.patch("floodcast.model.training._mae", side_effect=scripted)
    tc = TrainConfig(max_epochs=6, early_stop_patience=2, batch_size=256)
    trained = fit_fold(small_arch, fold_data, tc)
    assert [h.val_mae for h in trained.history] == [0.5, 0.4, 0.45, 0.46]
    assert trained.best_epoch == 1


def test_non_finite_loss_reports_epoch(
    small_arch: ArchConfig, fold_data: FoldData, quick_train: TrainConfig
) -> None:
    temporal = fold_data.train.temporal.copy()
    temporal[0, 0, 0] = np.nan
    broken = replace(fold_data.train, temporal=temporal)
    model = build_model(small_arch)
    with pytest.raises(NonFiniteLossError, match="epoch 0"):
        train(model, broken, fold_data.validation, quick_train)


def test_train_rejects_inconsistent_batches(
    small_arch: ArchConfig, fold_data: FoldData, quick_train: TrainConfig
) -> None:
    model = build_model(small_arch)
    with pytest.raises(EmptyBatchError):
        empty = fold_data.train.take(np.array([], dtype=int))
        train(model, empty, fold_data.validation)
    with pytest.raises(ScalerMismatchError):
        train(
            model,
            fold_data.train,
            replace(fold_data.validation, scaler_digest="other"),
            quick_train,
        )
    short = build_model(small_arch.with_variant(look_back=1))
    with pytest.raises(ShapeMismatchError):
        train(short, fold_data.train, fold_data.validation, quick_train)


def test_predict_modes(
    small_arch: ArchConfig, quick_train: TrainConfig, fold_data: FoldData
) -> None:
    trained = fit_fold(small_arch, fold_data, quick_train)
    batch = fold_data.validation
    raw = predict(trained, batch, mode="metric")
    clamped = predict(trained, batch, mode="report")
    assert np.array_equal(clamped, np.maximum(raw, 0.0))
    with pytest.raises(InvalidConfigError):
        predict(trained, batch, mode="other")  # type: ignore[arg-type]
    with pytest.raises(ScalerMismatchError):
        predict(trained, replace(batch, scaler_digest=None))


def test_save_and_load(
    tmp_path: Path,
    small_arch: ArchConfig,
    quick_train: TrainConfig,
    fold_data: FoldData,
) -> None:
    trained = fit_fold(small_arch, fold_data, quick_train)
    path = trained.save(tmp_path / "models" / "fold.json")
    loaded = TrainedModel.load(path)
    assert loaded.config == trained.config
    assert loaded.train_config == quick_train
    assert loaded.scaler == fold_data.scaler
    assert loaded.scaler_digest == trained.scaler_digest
    assert loaded.history == trained.history
    batch = fold_data.validation
    assert np.array_equal(predict(loaded, batch), predict(trained, batch))

    raw = trained.to_dict()
    raw["version"] = "floodcast-model-v0"
    with pytest.raises(InvalidConfigError):
        TrainedModel.from_dict(raw)
    with pytest.raises(InvalidConfigError, match="look_back"):
        TrainedModel.from_dict(
            {**trained.to_dict(), "arch": {**small_arch.model_dump(), "look_back": 2}}
        )
    with pytest.raises(MissingFileError):
        TrainedModel.load(tmp_path / "absent.json")


def test_fold_jobs_keep_order_and_capture_errors(
    tables: Dict[str, EventFeatureTable],
    plan: SplitPlan,
    small_arch: ArchConfig,
    quick_train: TrainConfig,
) -> None:
    test_ids = tuple(plan.test_event_ids)
    jobs = [
        FoldJob("a", small_arch, plan.folds[1], test_ids, quick_train),
        FoldJob("b", small_arch, plan.folds[0], ("NOPE",), quick_train),
        FoldJob("c", small_arch, plan.folds[0], test_ids, quick_train),
    ]
    outcomes = list(run_fold_jobs(jobs, tables))
    assert [o.job.key for o in outcomes] == ["a", "b", "c"]
    assert outcomes[0].ok and outcomes[2].ok
    assert not outcomes[1].ok
    assert outcomes[1].error is not None
    assert outcomes[1].error["error"] == "UnknownEvent"
    assert set(outcomes[0].tests) == set(test_ids)


@pytest.mark.scheduled
def test_fold_jobs_match_across_workers(
    tables: Dict[str, EventFeatureTable],
    plan: SplitPlan,
    small_arch: ArchConfig,
    quick_train: TrainConfig,
) -> None:
    jobs = [
        FoldJob(fold.name, small_arch, fold, tuple(plan.test_event_ids), quick_train)
        for fold in plan.folds
    ]
    serial = [o.trained for o in run_fold_jobs(jobs, tables, workers=1)]
    parallel = [o.trained for o in run_fold_jobs(jobs, tables, workers=3)]
    for a, b in zip(serial, parallel):
        assert a is not None and b is not None
        assert a.history == b.history

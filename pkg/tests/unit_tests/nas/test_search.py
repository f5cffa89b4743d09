from pathlib import Path
from typing import Dict, List

import pandas as pd
import pytest

from floodcast.errors import EmptyLogError
from floodcast.features import EventFeatureTable
from floodcast.model import ArchConfig, TrainConfig
from floodcast.nas import (
    EXPORT_COLUMNS,
    TOP_RUNS_FILE,
    RunLogStore,
    RunRecord,
    export_runs,
    run_id,
    run_search,
    select_champion,
)
from floodcast.windowing import SplitPlan, loeo_splits
from tests.unit_tests.nas.sample_records import record


@pytest.fixture
def configs(small_arch: ArchConfig) -> List[ArchConfig]:
    return [small_arch, small_arch.with_variant(rnn_type="LSTM")]


def test_search_logs_one_record_per_config(
    tmp_path: Path,
    tables: Dict[str, EventFeatureTable],
    plan: SplitPlan,
    configs: List[ArchConfig],
    quick_train: TrainConfig,
) -> None:
    log = RunLogStore(tmp_path)
    records = list(run_search(configs, tables, plan, log, quick_train))
    assert [r.run_id for r in records] == [
        run_id(c, quick_train, plan) for c in configs
    ]
    assert all(r.ok for r in records)
    for r in records:
        assert len(r.folds) == len(plan.folds)
        assert (r.mae_m, r.rmse_m) == pytest.approx(r.recompute(), abs=1e-12)
        assert r.rmse_m is not None and r.mae_m is not None
        assert r.rmse_m >= r.mae_m
    assert [r.run_id for r in log.records()] == [r.run_id for r in records]

    # resuming trains nothing
    assert list(run_search(configs, tables, plan, log, quick_train)) == []


def test_failed_runs_are_logged_and_skipped(
    tmp_path: Path,
    tables: Dict[str, EventFeatureTable],
    small_arch: ArchConfig,
    quick_train: TrainConfig,
) -> None:
    broken = loeo_splits(["E01", "E02", "E03"], ["NOPE"])
    log = RunLogStore(tmp_path)
    (failed,) = run_search([small_arch], tables, broken, log, quick_train)
    assert failed.status == "failed"
    assert failed.error is not None
    assert failed.error["error"] == "UnknownEvent"
    assert failed.mae_m is None

    assert list(run_search([small_arch], tables, broken, log, quick_train)) == []
    retried = list(
        run_search([small_arch], tables, broken, log, quick_train, retry_failed=True)
    )
    assert len(retried) == 1
    assert len(log.path.read_text().splitlines()) == 2


def test_champion_tie_breaks() -> None:
    runs = [
        record("d", 0.030, n_params=900),
        record("c", 0.030, n_params=800),
        record("b", 0.030, n_params=800),
        record("a", 0.031),
        record("e", status="failed"),
    ]
    assert select_champion(runs).run_id == "b"
    lower_rmse = record("z", 0.030, rmse_m=0.059, n_params=5000)
    assert select_champion(runs + [lower_rmse]).run_id == "z"
    assert select_champion([record("x", 0.05), record("y", 0.03)]).run_id == "y"


def test_champion_needs_a_successful_run(tmp_path: Path) -> None:
    with pytest.raises(EmptyLogError):
        select_champion(RunLogStore(tmp_path))
    with pytest.raises(EmptyLogError):
        select_champion([record("e", status="failed")])


def test_export_runs(tmp_path: Path) -> None:
    log = RunLogStore(tmp_path)
    log.mset([(k, record(k, 0.01 * (i + 1))) for i, k in enumerate("abc")])
    paths = export_runs(log, tmp_path / "out", k=500)
    top = pd.read_csv(paths[0])
    assert paths[0].name == TOP_RUNS_FILE
    assert list(top.columns) == EXPORT_COLUMNS
    assert top["run_id"].tolist() == ["a", "b", "c"]
    assert top["head_units"][0] == "64-64-16-1"
    assert top["max15"][0] == "Y"
    assert len(pd.read_csv(export_runs(log, tmp_path / "two", k=2)[0])) == 2
    distribution = pd.read_csv(paths[1])
    assert set(distribution["grouping"]) == {"spatial_layers", "head_layers"}
    with pytest.raises(EmptyLogError):
        export_runs([], tmp_path / "none")


def test_records_are_reproducible(
    tmp_path: Path,
    tables: Dict[str, EventFeatureTable],
    plan: SplitPlan,
    small_arch: ArchConfig,
    quick_train: TrainConfig,
) -> None:
    def search(directory: Path) -> RunRecord:
        log = RunLogStore(directory)
        (only,) = run_search([small_arch], tables, plan, log, quick_train)
        return only

    a = search(tmp_path / "a")
    b = search(tmp_path / "b")
    assert a.without_wall_time() == b.without_wall_time()

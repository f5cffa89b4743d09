from pathlib import Path
from typing import List

import pandas as pd
import pytest

from floodcast.errors import EmptyInputError, SchemaMismatchError
from floodcast.eval import (
    FOLD_COLUMNS,
    FOLDS_FILE,
    FULL_REPORT_COLUMNS,
    REPORT_COLUMNS,
    REPORT_FILE,
    EventScore,
    FoldScores,
    MetricsReport,
    aggregate_from_folds,
    fold_frame,
    report_frame,
    write_report,
)


@pytest.fixture
def reports() -> List[MetricsReport]:
    def fold(k: int, maes: List[float]) -> FoldScores:
        return FoldScores(
            fold=k,
            validation_event_id=f"E{k:02d}",
            events=[
                EventScore(
                    event_id=f"T{j}", mae_m=m, rmse_m=m * 1.7 + 0.001, n_samples=20 + j
                )
                for j, m in enumerate(maes)
            ],
        )

    return [
        MetricsReport(
            variant="GRU-max15-L4",
            rnn_type="GRU",
            include_max15=True,
            look_back=4,
            folds=[fold(0, [0.031, 0.047, 0.012]), fold(1, [0.029, 0.051, 0.013])],
        ),
        MetricsReport(variant="zero", look_back=4, folds=[fold(0, [0.09, 0.12])]),
    ]


def test_report_layouts(reports: List[MetricsReport]) -> None:
    mini = report_frame(reports)
    assert list(mini.columns) == REPORT_COLUMNS
    assert mini["max15"].tolist() == ["Y", "n/a"]
    assert mini["rnn_type"].tolist() == ["GRU", "n/a"]
    full = report_frame(reports, layout="full")
    assert list(full.columns) == FULL_REPORT_COLUMNS
    assert full["sample_weight"].tolist() == ["N", "N"]
    with pytest.raises(EmptyInputError):
        report_frame([])


def test_aggregates_recompute_from_fold_rows(reports: List[MetricsReport]) -> None:
    folds = fold_frame(reports)
    assert list(folds.columns) == FOLD_COLUMNS
    assert len(folds) == 3 + 3 + 2
    recomputed = aggregate_from_folds(folds).set_index("variant")
    for report in reports:
        assert abs(recomputed.loc[report.variant, "mae_m"] - report.mae_m) <= 1e-12
        assert abs(recomputed.loc[report.variant, "rmse_m"] - report.rmse_m) <= 1e-12
    with pytest.raises(SchemaMismatchError):
        aggregate_from_folds(folds.drop(columns="n_samples"))


def test_write_report(tmp_path: Path, reports: List[MetricsReport]) -> None:
    paths = write_report(reports, tmp_path / "out")
    assert [p.name for p in paths] == [REPORT_FILE, FOLDS_FILE]
    header = paths[0].read_text().splitlines()[0]
    assert header == "variant,rnn_type,max15,look_back,mae_m,rmse_m"
    loaded = pd.read_csv(paths[1])
    recomputed = aggregate_from_folds(loaded).set_index("variant")
    assert recomputed.loc["zero", "mae_m"] == pytest.approx(0.105, abs=1e-12)


def test_pooled_aggregates_recompute_from_fold_rows(tmp_path: Path) -> None:
    fold = FoldScores(
        fold=0,
        validation_event_id="E01",
        events=[
            EventScore(event_id="T1", mae_m=0.02, rmse_m=0.03, n_samples=100),
            EventScore(event_id="T2", mae_m=0.06, rmse_m=0.08, n_samples=10),
        ],
    )
    pooled = MetricsReport(variant="p", look_back=4, folds=[fold], pooled=True)
    plain = MetricsReport(variant="u", look_back=4, folds=[fold])
    assert pooled.mae_m == pytest.approx(0.026 / 1.1)
    paths = write_report([pooled, plain], tmp_path)
    loaded = pd.read_csv(paths[1])
    assert loaded["pooled"].tolist() == [True, True, False, False]
    recomputed = aggregate_from_folds(loaded).set_index("variant")
    for report in (pooled, plain):
        assert abs(recomputed.loc[report.variant, "mae_m"] - report.mae_m) <= 1e-12
        assert abs(recomputed.loc[report.variant, "rmse_m"] - report.rmse_m) <= 1e-12
    assert recomputed.loc["u", "mae_m"] == pytest.approx(0.04)

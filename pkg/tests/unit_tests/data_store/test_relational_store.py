from dataclasses import replace
from pathlib import Path

import pandas as pd
import pytest

from floodcast.data_store import (
    DEPTH_COLUMNS,
    DEPTHS_FILE,
    EVENTS_FILE,
    GAUGES_FILE,
    RAIN_FILE,
    SEGMENTS_FILE,
    TIDE_FILE,
    FloodDataset,
    load_event_series,
    load_relational,
    load_study_area,
    load_table,
    save_relational,
    save_table,
)
from floodcast.errors import (
    CoverageGapError,
    DuplicateIdError,
    ForeignKeyError,
    MissingFileError,
    NonFiniteValueError,
    SchemaMismatchError,
    UnknownEventError,
)
from floodcast.synth_hydro import gen_dataset, make_roster


@pytest.fixture
def data_dir(tmp_path: Path, small_dataset: FloodDataset) -> Path:
    save_relational(small_dataset, tmp_path / "data")
    return tmp_path / "data"


def write(path: Path, text: str) -> Path:
    path.write_text(text)
    return path


def test_load_study_area(data_dir: Path) -> None:
    segments, gauges = load_study_area(data_dir / SEGMENTS_FILE, data_dir / GAUGES_FILE)
    assert len(segments) == 6
    assert len(gauges) == 3
    assert [s.segment_id for s in segments] == [1, 2, 3, 4, 5, 6]


def test_duplicate_segment(tmp_path: Path) -> None:
    segments = write(
        tmp_path / "segments.csv",
        "segment_id,x_m,y_m,street_name,elv_m,twi,dtw_cm\n"
        "1,0,0,Main,1.0,8.0,30\n"
        "1,5,5,Main,2.0,9.0,40\n",
    )
    gauges = write(tmp_path / "gauges.csv", "gauge_id,x_m,y_m\n1,0,0\n")
    with pytest.raises(DuplicateIdError):
        load_study_area(segments, gauges)


@pytest.mark.parametrize(
    "content, error",
    [
        ("segment_id,x_m,y_m\n1,0,0\n", SchemaMismatchError),
        (
            "segment_id,x_m,y_m,street_name,elv_m,twi,dtw_cm\n1,0,0,A,inf,8,30\n",
            NonFiniteValueError,
        ),
        (
            "segment_id,x_m,y_m,street_name,elv_m,twi,dtw_cm\n1.5,0,0,A,1,8,30\n",
            SchemaMismatchError,
        ),
        (
            "segment_id,x_m,y_m,street_name,elv_m,twi,dtw_cm\n1,0,0,A,1,8,-3\n",
            SchemaMismatchError,
        ),
        ("", SchemaMismatchError),
    ],
)
def test_bad_segment_files(tmp_path: Path, content: str, error: type) -> None:
    segments = write(tmp_path / "segments.csv", content)
    gauges = write(tmp_path / "gauges.csv", "gauge_id,x_m,y_m\n1,0,0\n")
    with pytest.raises(error):
        load_study_area(segments, gauges)


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(MissingFileError):
        load_study_area(tmp_path / "absent.csv", tmp_path / "absent.csv")


def test_event_series_are_trimmed_to_their_window(data_dir: Path) -> None:
    series = load_event_series(
        data_dir / RAIN_FILE, data_dir / TIDE_FILE, data_dir / EVENTS_FILE
    )
    assert list(series) == ["E01", "E02", "E03", "E04"]
    first = series["E01"]
    assert len(first.tide) == 28
    assert {len(r) for r in first.rain.values()} == {112}
    assert first.usable
    only = load_event_series(
        data_dir / RAIN_FILE, data_dir / TIDE_FILE, data_dir / EVENTS_FILE, ["E03"]
    )
    assert list(only) == ["E03"]
    with pytest.raises(UnknownEventError):
        load_event_series(
            data_dir / RAIN_FILE, data_dir / TIDE_FILE, data_dir / EVENTS_FILE, ["X"]
        )


def test_tide_gap(data_dir: Path) -> None:
    tide = pd.read_csv(data_dir / TIDE_FILE)
    tide.iloc[1:].to_csv(data_dir / TIDE_FILE, index=False)
    with pytest.raises(CoverageGapError):
        load_event_series(
            data_dir / RAIN_FILE, data_dir / TIDE_FILE, data_dir / EVENTS_FILE
        )


def test_short_event_is_loaded_but_unusable(tmp_path: Path) -> None:
    dataset = gen_dataset(3, 2, seed=1, roster=make_roster(3, 0.34, True))
    save_relational(dataset, tmp_path)
    series = load_event_series(
        tmp_path / RAIN_FILE, tmp_path / TIDE_FILE, tmp_path / EVENTS_FILE
    )
    short = series["E04"]
    assert short.event.duration_hrs == 5
    assert not short.usable
    assert len(short.tide) == 5


def test_round_trip(data_dir: Path, small_dataset: FloodDataset) -> None:
    loaded = load_relational(data_dir)
    assert loaded.area.segments == small_dataset.area.segments
    assert loaded.area.gauges == small_dataset.area.gauges
    assert loaded.events == small_dataset.events
    assert loaded.manifest["seed"] == 7
    assert loaded.depths is not None and small_dataset.depths is not None
    expected = small_dataset.depths.sort_values(["segment_id", "timestamp"])
    assert loaded.depths["depth_m"].tolist() == expected["depth_m"].tolist()
    for event_id, series in small_dataset.series.items():
        assert loaded.series[event_id].tide.tolist() == series.tide.tolist()


def test_resave_is_byte_stable(tmp_path: Path, data_dir: Path) -> None:
    save_relational(load_relational(data_dir), tmp_path / "again")
    for path in sorted(data_dir.iterdir()):
        assert (tmp_path / "again" / path.name).read_bytes() == path.read_bytes()


def test_save_checks_foreign_keys(tmp_path: Path, small_dataset: FloodDataset) -> None:
    assert small_dataset.depths is not None
    depths = small_dataset.depths.copy()
    depths.loc[0, "segment_id"] = 99
    with pytest.raises(ForeignKeyError):
        save_relational(replace(small_dataset, depths=depths), tmp_path / "bad")
    assert not (tmp_path / "bad").exists()

    late = small_dataset.depths.copy()
    late.loc[0, "timestamp"] = pd.Timestamp("2030-01-01")
    with pytest.raises(ForeignKeyError):
        save_relational(replace(small_dataset, depths=late), tmp_path / "bad")


def test_table_round_trip(tmp_path: Path, small_dataset: FloodDataset) -> None:
    assert small_dataset.depths is not None
    path = save_table(small_dataset.depths, DEPTH_COLUMNS, tmp_path / "x" / DEPTHS_FILE)
    frame = load_table(path, DEPTH_COLUMNS)
    assert len(frame) == len(small_dataset.depths)
    assert frame["timestamp"].dtype.kind == "M"
    with pytest.raises(DuplicateIdError):
        doubled = pd.concat([frame, frame.iloc[:1]])
        path = save_table(doubled, DEPTH_COLUMNS, tmp_path / "d.csv")
        load_table(path, DEPTH_COLUMNS)

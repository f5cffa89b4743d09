from typing import List

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from floodcast.data_store import StreetSegment, StudyArea
from floodcast.errors import EmptyTableError, IncompleteFeaturesError, InvalidCountError
from floodcast.features import EventFeatureTable
from floodcast.synth_hydro import (
    OracleParams,
    gen_dataset,
    make_roster,
    oracle_depths,
    select_flood_prone,
)
from tests.unit_tests.features.sample_tables import make_table


def area_of(
    elevations: List[float], twi: float = 8.0, dtw: float = 50.0
) -> StudyArea:
    return StudyArea(
        segments=[
            StreetSegment(
                segment_id=k + 1, x_m=0.0, y_m=0.0, elv_m=e, twi=twi, dtw_cm=dtw
            )
            for k, e in enumerate(elevations)
        ],
        gauges=[],
    )


def with_columns(
    table: EventFeatureTable, **columns: np.ndarray
) -> EventFeatureTable:
    frame = table.frame.copy()
    for name, values in columns.items():
        frame[name] = np.asarray(values, dtype=float).reshape(-1)
    return table.with_frame(frame)


def test_leaky_accumulator() -> None:
    params = OracleParams(
        retention=0.6, rain_gain=0.004, twi_gain=0, tide_gain=0, dtw_gain=0
    )
    table = with_columns(make_table("E", 1, 2), rh_mm=[10.0, 0.0])
    depths = oracle_depths(area_of([1.0]), table, params)
    assert depths["depth_m"].tolist() == pytest.approx([0.04, 0.024], abs=1e-15)
    assert list(depths.columns) == ["segment_id", "timestamp", "depth_m"]


def test_dry_area_stays_at_zero() -> None:
    table = with_columns(
        make_table("E", 3, 6),
        rh_mm=np.zeros((3, 6)),
        td_hr_m=np.full((3, 6), -0.5),
    )
    area = StudyArea(
        segments=[
            StreetSegment(segment_id=1, x_m=0, y_m=0, elv_m=0.5, twi=4.0, dtw_cm=10),
            StreetSegment(segment_id=2, x_m=0, y_m=0, elv_m=2.0, twi=14.0, dtw_cm=90),
            StreetSegment(segment_id=3, x_m=0, y_m=0, elv_m=9.0, twi=9.0, dtw_cm=600),
        ],
        gauges=[],
    )
    assert not oracle_depths(area, table)["depth_m"].any()


def test_lower_segment_floods_first() -> None:
    tide = np.tile(np.linspace(-0.2, 1.2, 10), (2, 1))
    table = with_columns(
        make_table("E", 2, 10, seed=2), rh_mm=np.ones((2, 10)), td_hr_m=tide
    )
    depth = oracle_depths(area_of([0.3, 0.8]), table)["depth_m"].to_numpy()
    low, high = depth.reshape(2, 10)
    assert (low >= high).all()
    assert (low > high).any()


def test_depth_grows_with_any_rain_value() -> None:
    rng = np.random.default_rng(0)
    area = StudyArea(
        segments=[
            StreetSegment(
                segment_id=k + 1,
                x_m=0,
                y_m=0,
                elv_m=rng.uniform(0, 3),
                twi=rng.uniform(4, 14),
                dtw_cm=rng.uniform(0, 300),
            )
            for k in range(4)
        ],
        gauges=[],
    )
    base = make_table("E", 4, 12, seed=1)
    before = oracle_depths(area, base)["depth_m"].to_numpy()
    for _ in range(20):
        rh = base.grid("rh_mm").copy()
        rh[rng.integers(4), rng.integers(12)] += rng.uniform(0, 5)
        after = oracle_depths(area, with_columns(base, rh_mm=rh))["depth_m"]
        assert (after.to_numpy() >= before).all()


def test_oracle_is_deterministic() -> None:
    table = make_table("E", 3, 8, seed=4)
    area = area_of([0.1, 0.5, 3.0])
    assert oracle_depths(area, table).equals(oracle_depths(area, table))


def test_oracle_errors() -> None:
    table = make_table("E", 2, 4)
    with pytest.raises(IncompleteFeaturesError):
        oracle_depths(area_of([1.0]), table)
    with pytest.raises(IncompleteFeaturesError):
        scaled = table.with_frame(table.frame, scaler_digest="x")
        oracle_depths(area_of([1.0, 1.0]), scaled)
    with pytest.raises(ValidationError):
        OracleParams(retention=1.0)
    with pytest.raises(ValidationError):
        OracleParams(wet_scale_m=0.01, dtw_gain=0.03)


def test_flood_prone_ties_go_to_lower_id() -> None:
    depths = pd.DataFrame(
        {
            "segment_id": [3, 1, 2, 3, 1, 2],
            "timestamp": pd.to_datetime(
                ["2016-01-01"] * 3 + ["2016-01-01 01:00"] * 3
            ),
            "depth_m": [0.2, 0.1, 0.05, 0.0, 0.1, 0.0],
        }
    )
    assert select_flood_prone(depths, 2) == [1, 3]
    assert select_flood_prone(depths, 3) == [1, 3, 2]
    with pytest.raises(InvalidCountError):
        select_flood_prone(depths, 4)
    with pytest.raises(EmptyTableError):
        select_flood_prone(depths.iloc[:0], 1)


def test_flood_prone_segments_lie_low() -> None:
    dataset = gen_dataset(
        60, 1, seed=3, roster=make_roster(4, 0.25), oracle=OracleParams(twi_gain=0)
    )
    assert dataset.depths is not None
    chosen = select_flood_prone(dataset.depths, 6, dataset.events)
    elv = {s.segment_id: s.elv_m for s in dataset.area.segments}
    assert len(chosen) == 6
    assert np.mean([elv[i] for i in chosen]) < np.mean(list(elv.values()))

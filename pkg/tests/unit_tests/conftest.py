from typing import Dict, List

import pytest

from floodcast.data_store import FloodDataset
from floodcast.features import AttachDepths, EventFeatureTable, build_event_table
from floodcast.model import ArchConfig, TrainConfig
from floodcast.neuralnet import RegSpec
from floodcast.synth_hydro import gen_dataset, make_roster
from floodcast.windowing import SplitPlan, plan_for_events
from tests.unit_tests.features.sample_tables import make_table


@pytest.fixture(scope="session")
def small_dataset() -> FloodDataset:
    """6 segments, 3 gauges, 3 training events and 1 test event."""
    return gen_dataset(
        6, 3, seed=7, bounds_m=(2000.0, 2000.0), roster=make_roster(4, 0.25)
    )


@pytest.fixture(scope="session")
def tables(small_dataset: FloodDataset) -> Dict[str, EventFeatureTable]:
    assert small_dataset.depths is not None
    attach = AttachDepths(small_dataset.depths)
    return {
        event_id: attach.transform_event(
            build_event_table(series, small_dataset.area)
        )
        for event_id, series in small_dataset.series.items()
    }


@pytest.fixture(scope="session")
def plan(small_dataset: FloodDataset) -> SplitPlan:
    return plan_for_events(small_dataset.events, 4)


@pytest.fixture
def small_arch() -> ArchConfig:
    return ArchConfig(
        rnn_type="GRU",
        rnn_units=12,
        spatial_units=4,
        head_units=(32, 16, 1),
        head_act="selu",
    )


@pytest.fixture
def quick_train() -> TrainConfig:
    return TrainConfig(
        max_epochs=3, early_stop_patience=2, batch_size=64, reg=RegSpec(l1=0, l2=0)
    )


@pytest.fixture
def random_tables() -> List[EventFeatureTable]:
    return [
        make_table(f"R{k:02d}", 3, 12, start=f"2016-0{k + 1}-01T00:00:00", seed=k)
        for k in range(4)
    ]

from dataclasses import replace
from typing import Dict

import numpy as np
import pytest

from floodcast.errors import (
    EmptyBatchError,
    EventTooShortError,
    ScalerMismatchError,
    ShapeMismatchError,
)
from floodcast.features import Feature, EventFeatureTable
from floodcast.synth_hydro import REFERENCE_DURATIONS
from floodcast.windowing import build_batches, build_samples, merge_batches
from tests.unit_tests.features.sample_tables import make_table


@pytest.mark.parametrize("duration", sorted(set(REFERENCE_DURATIONS)))
@pytest.mark.parametrize("look_back", [1, 4])
def test_sample_count_per_segment(duration: int, look_back: int) -> None:
    batch = build_samples(make_table("E", 1, duration), look_back, True)
    assert len(batch) == duration - look_back


def test_reference_counts() -> None:
    assert len(build_samples(make_table("E", 1, 28), 4, True)) == 24
    assert len(build_samples(make_table("E", 1, 60), 4, True)) == 56
    assert len(build_samples(make_table("E", 1, 28), 1, True)) == 27
    assert len(build_samples(make_table("E", 3, 28), 4, True)) == 72


@pytest.mark.parametrize("include_max15, width", [(False, 4), (True, 5)])
def test_temporal_width(include_max15: bool, width: int) -> None:
    batch = build_samples(make_table("E", 2, 10), 4, include_max15)
    assert batch.temporal.shape == (12, 4, width)
    assert batch.spatial.shape == (12, 3)
    assert batch.include_max15 is include_max15


def test_window_covers_strictly_previous_hours() -> None:
    table = make_table("E", 2, 8, seed=3)
    batch = build_samples(table, 3, include_max15=False)
    rh = table.grid(Feature.RH.column)
    depth = table.grid("depth_m")
    for k, row in batch.index.iterrows():
        s = int(row["segment_id"]) - 1
        t = int(row["hour"])
        assert t >= 3
        assert batch.temporal[k, :, 0] == pytest.approx(rh[s, t - 3 : t])
        assert batch.targets is not None
        assert batch.targets[k] == depth[s, t]
        assert batch.spatial[k, 0] == table.grid(Feature.ELV.column)[s, 0]


def test_index_has_no_cross_event_window() -> None:
    batches = build_batches(
        [make_table("A", 2, 10), make_table("B", 2, 7, start="2016-07-01")], 4, True
    )
    merged = merge_batches(batches, ["A", "B"])
    assert len(merged) == 2 * 6 + 2 * 3
    assert merged.index["hour"].min() == 4
    assert merged.event_ids == ["A", "B"]
    assert len(merged.for_event("B")) == 6


def test_short_event() -> None:
    with pytest.raises(EventTooShortError):
        build_samples(make_table("E", 1, 4), 4, True)
    batches = build_batches([make_table("E", 1, 4), make_table("F", 1, 6)], 4, True)
    assert list(batches) == ["F"]


def test_shuffle_keeps_triples_together() -> None:
    batch = build_samples(make_table("E", 3, 12), 4, True)
    shuffled = batch.shuffled(np.random.default_rng(0))
    order = shuffled.index.merge(
        batch.index.reset_index(), on=["segment_id", "hour"]
    )["index"].to_numpy()
    assert np.array_equal(shuffled.temporal, batch.temporal[order])
    assert np.array_equal(shuffled.spatial, batch.spatial[order])
    assert shuffled.targets is not None and batch.targets is not None
    assert np.array_equal(shuffled.targets, batch.targets[order])


def test_concat_checks_compatibility() -> None:
    a = build_samples(make_table("A", 1, 8), 4, True)
    with pytest.raises(ShapeMismatchError):
        type(a).concat([a, build_samples(make_table("B", 1, 8), 4, False)])
    with pytest.raises(ScalerMismatchError):
        type(a).concat([a, replace(a, scaler_digest="x")])
    with pytest.raises(EmptyBatchError):
        merge_batches({"A": a}, ["A", "B"])


def test_windows_of_fixture_events(tables: Dict[str, EventFeatureTable]) -> None:
    for table in tables.values():
        batch = build_samples(table, 4, True)
        assert len(batch) == (table.n_hours - 4) * 6

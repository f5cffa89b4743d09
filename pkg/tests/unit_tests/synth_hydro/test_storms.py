from datetime import datetime, timedelta

import numpy as np
import pytest

from floodcast.errors import InvalidConfigError, InvalidDurationError
from floodcast.synth_hydro import (
    REFERENCE_ROSTER,
    SHORT_EVENT,
    TideModel,
    gen_event,
    gen_study_area,
    make_roster,
)

AREA = gen_study_area(10, 4, seed=5)


def test_series_lengths() -> None:
    series = gen_event(AREA, 28, 6.0, seed=1)
    assert series.event.duration_hrs == 28
    assert len(series.tide) == 28
    assert set(series.rain) == {1, 2, 3, 4}
    assert all(len(rain) == 112 for rain in series.rain.values())


def test_dry_lead_in_and_tail() -> None:
    series = gen_event(AREA, 12, 4.0, seed=2)
    rain = np.vstack([r.to_numpy() for r in series.rain.values()])
    assert not rain[:, :8].any()
    assert not rain[:, -8:].any()
    assert rain.max() == pytest.approx(4.0)
    assert (rain >= 0).all()


def test_events_are_deterministic() -> None:
    a = gen_event(AREA, 20, 5.0, seed=9)
    b = gen_event(AREA, 20, 5.0, seed=9)
    for gauge_id, rain in a.rain.items():
        assert rain.equals(b.rain[gauge_id])
    assert a.tide.equals(b.tide)


def test_zero_peak_is_dry() -> None:
    series = gen_event(AREA, 8, 0.0, seed=4)
    assert all(not rain.any() for rain in series.rain.values())


def test_invalid_events() -> None:
    with pytest.raises(InvalidDurationError):
        gen_event(AREA, 5, 1.0, seed=0)
    with pytest.raises(InvalidConfigError):
        gen_event(AREA, 10, -1.0, seed=0)


def test_tide_extrema_span_twice_the_amplitude() -> None:
    tide = TideModel(amplitude_m=0.45, offset_m=0.2, phase_hrs=3.1)
    start = datetime(2016, 6, 5, 12)
    high, low = tide.extrema(start, start + timedelta(hours=27))
    assert high - low == pytest.approx(0.9, abs=1e-9)
    assert high == pytest.approx(0.65, abs=1e-9)

    hourly = tide.series(gen_event(AREA, 28, 1.0, seed=0, start=start).event)
    assert hourly.max() <= high + 1e-12
    assert hourly.min() >= low - 1e-12


def test_reference_roster() -> None:
    roster = make_roster()
    assert roster == REFERENCE_ROSTER
    assert [e.split for e in roster].count("test") == 4
    assert SHORT_EVENT.duration_hrs == 5


def test_generated_roster() -> None:
    roster = make_roster(8, 0.25, include_short_event=True)
    assert len(roster) == 9
    assert [e.event_id for e in roster][-1] == "E09"
    assert [e.split for e in roster[:8]] == ["train"] * 6 + ["test"] * 2
    assert not roster[-1].event().usable
    starts = [e.start for e in roster]
    assert starts == sorted(starts)
    with pytest.raises(InvalidConfigError):
        make_roster(0)

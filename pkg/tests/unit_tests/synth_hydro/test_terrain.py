import numpy as np
import pytest

from floodcast.errors import InvalidConfigError, InvalidCountError
from floodcast.synth_hydro import MAX_ELEVATION_M, gen_study_area


def test_same_seed_same_area() -> None:
    assert gen_study_area(1, 1, seed=7) == gen_study_area(1, 1, seed=7)
    a = gen_study_area(20, 3, seed=7)
    b = gen_study_area(20, 3, seed=8)
    assert a.segments != b.segments


def test_elevation_range() -> None:
    area = gen_study_area(2000, 5, seed=1)
    elv = np.array([s.elv_m for s in area.segments])
    assert elv.min() >= 0.0
    assert elv.max() <= MAX_ELEVATION_M
    assert [s.segment_id for s in area.segments] == list(range(1, 2001))


def test_dtw_grows_with_elevation() -> None:
    area = gen_study_area(500, 3, seed=3)
    elv = np.array([s.elv_m for s in area.segments])
    dtw = np.array([s.dtw_cm for s in area.segments])
    assert np.corrcoef(elv, dtw)[0, 1] > 0
    assert (dtw >= 0).all()


def test_everything_inside_bounds() -> None:
    area = gen_study_area(300, 12, bounds_m=(800.0, 200.0), seed=2)
    for item in list(area.segments) + list(area.gauges):
        assert 0 <= item.x_m <= 800.0
        assert 0 <= item.y_m <= 200.0
    assert area.bounds_m == (800.0, 200.0)
    assert np.isfinite([s.twi for s in area.segments]).all()


def test_invalid_inputs() -> None:
    with pytest.raises(InvalidCountError):
        gen_study_area(0, 1)
    with pytest.raises(InvalidCountError):
        gen_study_area(1, 0)
    with pytest.raises(InvalidConfigError):
        gen_study_area(1, 1, bounds_m=(0.0, 100.0))

import numpy as np
import pytest

from floodcast.errors import InvalidConfigError, LengthMismatchError, NoGaugesError
from floodcast.features import IdwInterpolator, idw_interpolate


def test_coincident_gauge_is_exact() -> None:
    gauges = [(0.0, 0.0, 5.0), (30.0, 40.0, 1.0)]
    assert idw_interpolate(gauges, (0.0, 0.0)) == 5.0


def test_equal_distances() -> None:
    assert idw_interpolate([(-1.0, 0.0, 2.0), (1.0, 0.0, 4.0)], (0.0, 0.0)) == 3.0


def test_weights_follow_inverse_square_distance() -> None:
    gauges = [(1.0, 0.0, 1.0), (0.0, 2.0, 2.0), (-2.0, 0.0, 3.0)]
    assert idw_interpolate(gauges, (0.0, 0.0), power=2) == pytest.approx(1.5)


def test_errors() -> None:
    with pytest.raises(NoGaugesError):
        idw_interpolate([], (0.0, 0.0))
    with pytest.raises(InvalidConfigError):
        idw_interpolate([(0.0, 0.0, 1.0)], (1.0, 1.0), power=0)
    interpolate = IdwInterpolator([[0.0, 0.0], [1.0, 1.0]], [[0.5, 0.0]])
    with pytest.raises(LengthMismatchError):
        interpolate(np.zeros(3))


def test_constant_field_and_bounds() -> None:
    rng = np.random.default_rng(4)
    gauge_xy = rng.uniform(0, 1000, (7, 2))
    target_xy = np.vstack([rng.uniform(-200, 1200, (500, 2)), gauge_xy[:2]])
    interpolate = IdwInterpolator(gauge_xy, target_xy)

    constant = interpolate(np.full(7, 2.75))
    assert np.array_equal(constant, np.full(len(target_xy), 2.75))

    values = rng.uniform(0, 50, (7, 24))
    out = interpolate(values)
    assert out.shape == (502, 24)
    assert (out >= values.min(axis=0)).all()
    assert (out <= values.max(axis=0)).all()
    assert np.array_equal(out[-2:], values[:2])


def test_ordering_is_kept() -> None:
    rng = np.random.default_rng(9)
    interpolate = IdwInterpolator(
        rng.uniform(0, 100, (5, 2)), rng.uniform(0, 100, (50, 2))
    )
    low = rng.uniform(0, 10, (5, 30))
    high = low + rng.uniform(0, 1e-9, low.shape)
    assert (interpolate(low) <= interpolate(high)).all()


def test_nearest_neighbors() -> None:
    interpolate = IdwInterpolator(
        [[0.0, 0.0], [10.0, 0.0], [1000.0, 0.0]], [[4.0, 0.0]], n_neighbors=2
    )
    assert interpolate.weights[0, 2] == 0.0
    assert interpolate.weights[0].sum() == pytest.approx(1.0)

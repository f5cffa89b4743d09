"""Synthetic study areas on a planar, smooth random terrain."""
import logging
import math
from typing import Tuple

import numpy as np
from pydantic import model_validator
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import gaussian_filter

from floodcast.data_store import RainGauge, StreetSegment, StudyArea
from floodcast.errors import InvalidConfigError, InvalidCountError

logger = logging.getLogger(__name__)

MAX_ELEVATION_M = 12.5
GRID_CELLS = 64
SMOOTHING_CELLS = 6.0
DTW_CM_PER_M = 60.0
DTW_NOISE_CM = 15.0
CELL_AREA_M2 = 50.0 * 7.2


class SyntheticArea(StudyArea):
    """A generated :class:`StudyArea` with the inputs that reproduce it."""

    seed: int
    bounds_m: Tuple[float, float]

    @model_validator(mode="after")
    def _check_inside(self) -> "SyntheticArea":
        width, height = self.bounds_m
        for item in list(self.segments) + list(self.gauges):
            if not (0 <= item.x_m <= width and 0 <= item.y_m <= height):
                raise ValueError(f"{item!r} lies outside {self.bounds_m}")
        return self


def _elevation_field(
    rng: np.random.Generator, bounds_m: Tuple[float, float]
) -> RegularGridInterpolator:
    noise = rng.standard_normal((GRID_CELLS, GRID_CELLS))
    field = gaussian_filter(noise, sigma=SMOOTHING_CELLS, mode="reflect")
    low, high = field.min(), field.max()
    field = (field - low) / (high - low) * MAX_ELEVATION_M
    xs = np.linspace(0.0, bounds_m[0], GRID_CELLS)
    ys = np.linspace(0.0, bounds_m[1], GRID_CELLS)
    return RegularGridInterpolator((xs, ys), field, method="linear")


def _slope(field: RegularGridInterpolator) -> RegularGridInterpolator:
    xs, ys = field.grid
    gx, gy = np.gradient(field.values, xs, ys)
    return RegularGridInterpolator((xs, ys), np.hypot(gx, gy), method="linear")


def gen_study_area(
    n_segments: int,
    n_gauges: int,
    bounds_m: Tuple[float, float] = (5000.0, 5000.0),
    seed: int = 0,
) -> SyntheticArea:
    """Generate segments and gauges scattered over a smooth terrain.

    ELV comes from a smoothed Gaussian field rescaled to [0, 12.5] m. TWI is
    ``ln(area / tan(slope))`` so it falls where the terrain is steep, and DTW
    grows with elevation.
    """
    if n_segments < 1:
        raise InvalidCountError(f"n_segments must be >= 1, got {n_segments}")
    if n_gauges < 1:
        raise InvalidCountError(f"n_gauges must be >= 1, got {n_gauges}")
    width, height = (float(b) for b in bounds_m)
    if not (math.isfinite(width) and math.isfinite(height)) or min(
        width, height
    ) <= 0:
        raise InvalidConfigError(f"bounds must be finite and > 0, got {bounds_m}")
    bounds = (width, height)

    rng = np.random.default_rng(seed)
    elevation = _elevation_field(rng, bounds)
    slope = _slope(elevation)

    xy = rng.uniform((0.0, 0.0), bounds, size=(n_segments, 2))
    elv = np.clip(elevation(xy), 0.0, MAX_ELEVATION_M)
    twi = np.log(CELL_AREA_M2 / (slope(xy) + 1e-4))
    dtw = np.maximum(
        0.0, DTW_CM_PER_M * elv + rng.normal(0.0, DTW_NOISE_CM, n_segments)
    )
    segments = [
        StreetSegment(
            segment_id=i + 1,
            x_m=float(xy[i, 0]),
            y_m=float(xy[i, 1]),
            street_name=f"Street {i // 10 + 1}",
            elv_m=float(elv[i]),
            twi=float(twi[i]),
            dtw_cm=float(dtw[i]),
        )
        for i in range(n_segments)
    ]
    gauge_xy = rng.uniform((0.0, 0.0), bounds, size=(n_gauges, 2))
    gauges = [
        RainGauge(gauge_id=j + 1, x_m=float(x), y_m=float(y))
        for j, (x, y) in enumerate(gauge_xy)
    ]
    logger.debug(
        "Generated %d segments and %d gauges (seed=%d)", n_segments, n_gauges, seed
    )
    return SyntheticArea(
        segments=segments, gauges=gauges, seed=seed, bounds_m=bounds
    )

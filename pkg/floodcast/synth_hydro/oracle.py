"""Ground-truth water depths of the synthetic areas.

A leaky rain accumulator plus tide overtopping, modulated by terrain:

    S(t)  = lam * S(t-1) + RH(t)                  S before the event is 0
    W(t)  = a * S(t) + c * max(0, TD(t) - ELV)
    depth = max(0, W + W / (W + kappa) * (b * TWI' - d * DTW'))

TWI' and DTW' are min-max normalized over the whole area. The terrain term
is gated by the wetness ``W`` so that a dry segment stays at exactly 0 m.
"""
import math
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from floodcast.data_store import DEPTH_COLUMNS, RainfallEvent, StudyArea
from floodcast.errors import (
    EmptyTableError,
    IncompleteFeaturesError,
    InvalidCountError,
)
from floodcast.features import EventFeatureTable, Feature


class OracleParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    retention: float = Field(default=0.6, gt=0, lt=1)
    rain_gain: float = Field(default=0.004, ge=0)
    twi_gain: float = Field(default=0.02, ge=0)
    tide_gain: float = Field(default=0.5, ge=0)
    dtw_gain: float = Field(default=0.03, ge=0)
    wet_scale_m: float = Field(default=0.05, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "OracleParams":
        for name, value in self.model_dump().items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        # Keeps depth non-decreasing in the wetness.
        if self.wet_scale_m < self.dtw_gain:
            raise ValueError(
                f"wet_scale_m ({self.wet_scale_m}) must be >= dtw_gain "
                f"({self.dtw_gain})"
            )
        return self


def _normalized(values: np.ndarray) -> np.ndarray:
    low, high = values.min(), values.max()
    if high <= low:
        return np.zeros_like(values)
    return (values - low) / (high - low)


def oracle_depths(
    area: StudyArea, table: EventFeatureTable, params: Optional[OracleParams] = None
) -> pd.DataFrame:
    """Depth of every (segment, hour) of ``table``, as depths.csv rows."""
    params = params or OracleParams()
    if table.is_scaled:
        raise IncompleteFeaturesError(
            f"event {table.event_id}: the oracle needs unscaled features"
        )
    table.require([Feature.RH.column, Feature.TD_HR.column])
    if table.frame.empty:
        raise IncompleteFeaturesError(f"event {table.event_id} has no rows")

    by_id = {s.segment_id: k for k, s in enumerate(area.segments)}
    twi_norm = _normalized(np.array([s.twi for s in area.segments]))
    dtw_norm = _normalized(np.array([s.dtw_cm for s in area.segments]))
    segment_ids = table.segment_ids
    missing = [int(i) for i in segment_ids if int(i) not in by_id]
    if missing:
        raise IncompleteFeaturesError(
            f"event {table.event_id}: segments {missing[:5]} are not in the area"
        )
    rows = np.array([by_id[int(i)] for i in segment_ids])
    elv = np.array([area.segments[k].elv_m for k in rows])[:, None]
    terrain = (
        params.twi_gain * twi_norm[rows] - params.dtw_gain * dtw_norm[rows]
    )[:, None]

    rh = table.grid(Feature.RH.column)
    tide = table.grid(Feature.TD_HR.column)
    storage = np.zeros_like(rh)
    level = np.zeros(rh.shape[0])
    for t in range(rh.shape[1]):
        level = params.retention * level + rh[:, t]
        storage[:, t] = level
    wetness = params.rain_gain * storage + params.tide_gain * np.maximum(
        0.0, tide - elv
    )
    gate = wetness / (wetness + params.wet_scale_m)
    depth = np.maximum(0.0, wetness + gate * terrain)

    frame = table.frame[["segment_id", "timestamp"]].copy()
    frame["depth_m"] = depth.reshape(-1)
    return frame[DEPTH_COLUMNS].reset_index(drop=True)


def select_flood_prone(
    depths: pd.DataFrame,
    k: int,
    events: Optional[Sequence[RainfallEvent]] = None,
) -> List[int]:
    """The ``k`` segments with the highest mean depth.

    With ``events`` the mean runs over the hours of their training events only.
    Ties go to the lower segment id.
    """
    frame = depths
    if events is not None:
        hours = [h for e in events if e.split == "train" for h in e.hours()]
        frame = depths[depths["timestamp"].isin(hours)]
    if frame.empty:
        raise EmptyTableError("no depth rows to rank")
    mean = frame.groupby("segment_id")["depth_m"].mean()
    if not 1 <= k <= len(mean):
        raise InvalidCountError(f"k must be in [1, {len(mean)}], got {k}")
    ids = mean.index.to_numpy()
    order = np.lexsort((ids, -mean.to_numpy()))
    return [int(i) for i in ids[order[:k]]]

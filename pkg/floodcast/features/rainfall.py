"""Hourly rainfall features, interpolated from gauges to segments.

The hourly row stamped T aggregates the quarter hours stamped T, T+15, T+30
and T+45 minutes. Cumulative windows include the current hour and treat the
hours before the event start as dry.
"""
import logging
from typing import Dict, List, Mapping, Sequence

import numpy as np
import pandas as pd

from floodcast.data_store import (
    EventSeries,
    RainfallEvent,
    RainGauge,
    StreetSegment,
    StudyArea,
)
from floodcast.errors import (
    CoverageGapError,
    MissingTideError,
    NoGaugesError,
    UnknownSegmentError,
)

from .feature_table import FEATURE_COLUMNS, EventFeatureTable, Feature
from .idw import IdwInterpolator

logger = logging.getLogger(__name__)

HR2_WINDOW = 2
HR72_WINDOW = 72


def hourly_aggregates(quarters: np.ndarray) -> Dict[Feature, np.ndarray]:
    """Per-gauge RH, MAX15, HR_2, HR_72 from quarter-hour rain.

    ``quarters`` has shape (n_gauges, n_hours * 4). Every output has shape
    (n_gauges, n_hours).
    """
    n_gauges, n_quarters = quarters.shape
    q = quarters.reshape(n_gauges, n_quarters // 4, 4)
    rh = ((q[:, :, 0] + q[:, :, 1]) + q[:, :, 2]) + q[:, :, 3]
    max15 = q.max(axis=2)

    def shifted(k: int) -> np.ndarray:
        out = np.zeros_like(rh)
        if k < rh.shape[1]:
            out[:, k:] = rh[:, : rh.shape[1] - k]
        return out

    hr2 = rh + shifted(1)
    # Accumulate the older hours on top of HR_2 so that HR_72 >= HR_2 holds
    # after rounding.
    rest = np.zeros_like(rh)
    for k in range(HR2_WINDOW, min(HR72_WINDOW, rh.shape[1])):
        rest += shifted(k)
    hr72 = hr2 + rest
    return {
        Feature.RH: rh,
        Feature.MAX15: max15,
        Feature.HR_2: hr2,
        Feature.HR_72: hr72,
    }


def _gauge_matrix(
    rain: Mapping[int, pd.Series], gauges: Sequence[RainGauge], event: RainfallEvent
) -> np.ndarray:
    quarters = event.quarters()
    rows = []
    for gauge in gauges:
        if gauge.gauge_id not in rain:
            raise CoverageGapError(
                f"event {event.event_id}: no rain series for gauge {gauge.gauge_id}"
            )
        series = rain[gauge.gauge_id]
        missing = quarters.difference(series.index)
        if len(missing):
            raise CoverageGapError(
                f"event {event.event_id}: gauge {gauge.gauge_id} has no rain at "
                f"{missing[0].isoformat()}"
            )
        rows.append(series.loc[quarters].to_numpy(dtype=float))
    return np.vstack(rows)


def _grid_frame(
    event: RainfallEvent, segment_ids: np.ndarray, columns: Dict[str, np.ndarray]
) -> pd.DataFrame:
    hours = event.hours()
    n_hours = len(hours)
    data = {
        "segment_id": np.repeat(segment_ids, n_hours),
        "timestamp": np.tile(hours.to_numpy(), len(segment_ids)),
        "hour": np.tile(np.arange(n_hours), len(segment_ids)),
    }
    for name, values in columns.items():
        data[name] = values.reshape(-1)
    return pd.DataFrame(data)


def derive_rainfall_features(
    rain: Mapping[int, pd.Series],
    segments: Sequence[StreetSegment],
    gauges: Sequence[RainGauge],
    event: RainfallEvent,
    power: float = 2.0,
) -> EventFeatureTable:
    """Compute RH, MAX15, HR_2 and HR_72 at every segment of ``event``."""
    if not gauges:
        raise NoGaugesError("at least one gauge is needed")
    ordered = sorted(segments, key=lambda s: s.segment_id)
    gauge_xy = np.array([[g.x_m, g.y_m] for g in gauges])
    segment_xy = np.array([[s.x_m, s.y_m] for s in ordered])
    interpolate = IdwInterpolator(gauge_xy, segment_xy, power=power)

    per_gauge = hourly_aggregates(_gauge_matrix(rain, gauges, event))
    columns = {
        feature.column: interpolate(values) for feature, values in per_gauge.items()
    }
    segment_ids = np.array([s.segment_id for s in ordered], dtype=np.int64)
    logger.debug(
        "Event %s: rainfall features for %d segments from %d gauges",
        event.event_id,
        len(ordered),
        len(gauges),
    )
    return EventFeatureTable(
        event_id=event.event_id, frame=_grid_frame(event, segment_ids, columns)
    )


def attach_static_and_tide(
    table: EventFeatureTable,
    segments: Sequence[StreetSegment],
    tide: pd.Series,
) -> EventFeatureTable:
    """Complete ``table`` with TD_HR per hour and ELV/TWI/DTW per segment."""
    static_columns = [f.column for f in (Feature.ELV, Feature.TWI, Feature.DTW)]
    static = pd.DataFrame(
        [
            {
                "segment_id": s.segment_id,
                Feature.ELV.column: s.elv_m,
                Feature.TWI.column: s.twi,
                Feature.DTW.column: s.dtw_cm,
            }
            for s in segments
        ],
        columns=["segment_id"] + static_columns,
    )
    replaced = static_columns + [Feature.TD_HR.column]
    frame = table.frame.drop(
        columns=[c for c in replaced if c in table.frame.columns]
    )
    unknown = set(frame["segment_id"]) - set(static["segment_id"])
    if unknown:
        raise UnknownSegmentError(
            f"event {table.event_id}: unknown segments {sorted(unknown)[:5]}"
        )
    stamps = pd.DatetimeIndex(frame["timestamp"].unique())
    missing = stamps.difference(tide.index)
    if len(missing):
        raise MissingTideError(
            f"event {table.event_id}: no tide at {missing[0].isoformat()}"
        )
    tide_frame = pd.DataFrame(
        {
            "timestamp": stamps,
            Feature.TD_HR.column: tide.loc[stamps].to_numpy(dtype=float),
        }
    )
    frame = frame.merge(tide_frame, on="timestamp", how="left", validate="many_to_one")
    frame = frame.merge(static, on="segment_id", how="left", validate="many_to_one")
    frame = frame.sort_values(["segment_id", "timestamp"]).reset_index(drop=True)
    return table.with_frame(frame)


def build_event_table(
    series: EventSeries, area: StudyArea, power: float = 2.0
) -> EventFeatureTable:
    """All eight features of one event."""
    table = derive_rainfall_features(
        series.rain, area.segments, area.gauges, series.event, power=power
    )
    return attach_static_and_tide(table, area.segments, series.tide)


def event_summary(table: EventFeatureTable) -> Dict[str, float]:
    """Duration, total rain averaged over segments and the peak hourly rain."""
    rh = table.grid(Feature.RH.column)
    return {
        "duration_hrs": float(table.n_hours),
        "total_rain_mm": float(rh.sum(axis=1).mean()),
        "peak_rh_mm": float(rh.max()),
    }


def weather_frame(tables: Sequence[EventFeatureTable]) -> pd.DataFrame:
    """The rainfall columns of ``tables`` in the weather.csv layout."""
    columns = ["segment_id", "timestamp"] + [
        FEATURE_COLUMNS[f]
        for f in (Feature.RH, Feature.MAX15, Feature.HR_2, Feature.HR_72)
    ]
    if not tables:
        return pd.DataFrame(columns=columns)
    return pd.concat([t.frame[columns] for t in tables], ignore_index=True)


def tables_from_weather(
    weather: pd.DataFrame,
    events: Sequence[RainfallEvent],
    area: StudyArea,
    tides: Mapping[str, pd.Series],
) -> List[EventFeatureTable]:
    """Rebuild complete event tables from a loaded weather.csv."""
    tables = []
    for event in events:
        hours = event.hours()
        mask = weather["timestamp"].isin(hours)
        frame = weather.loc[mask].copy()
        if frame.empty:
            raise CoverageGapError(
                f"weather.csv has no row for event {event.event_id}"
            )
        start = pd.Timestamp(event.start)
        frame["hour"] = ((frame["timestamp"] - start) / pd.Timedelta(hours=1)).astype(
            "int64"
        )
        frame = frame.sort_values(["segment_id", "timestamp"]).reset_index(drop=True)
        expected = len(hours) * frame["segment_id"].nunique()
        if len(frame) != expected:
            raise CoverageGapError(
                f"event {event.event_id}: weather.csv has {len(frame)} rows, "
                f"expected {expected}"
            )
        table = EventFeatureTable(event_id=event.event_id, frame=frame)
        tables.append(
            attach_static_and_tide(table, area.segments, tides[event.event_id])
        )
    return tables


"""CSV files of the relational layout.

Static segment fields are stored once per segment and tide once per hour;
only the derived weather features and the target depths are stored per
(segment, hour).
"""
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from floodcast.errors import (
    CoverageGapError,
    DuplicateIdError,
    ForeignKeyError,
    IoFailureError,
    MissingFileError,
    NonFiniteValueError,
    SchemaMismatchError,
    UnknownEventError,
)

from .tables import (
    DEPTH_COLUMNS,
    EVENT_COLUMNS,
    GAUGE_COLUMNS,
    MIN_USABLE_HOURS,
    RAIN_COLUMNS,
    SEGMENT_COLUMNS,
    TIDE_COLUMNS,
    WEATHER_COLUMNS,
    EventSeries,
    FloodDataset,
    RainfallEvent,
    RainGauge,
    StreetSegment,
    StudyArea,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%S"
SEGMENTS_FILE = "segments.csv"
GAUGES_FILE = "gauges.csv"
RAIN_FILE = "raw_rain.csv"
TIDE_FILE = "tide.csv"
EVENTS_FILE = "events.csv"
WEATHER_FILE = "weather.csv"
DEPTHS_FILE = "depths.csv"
MANIFEST_FILE = "manifest.json"

_STRING_COLUMNS = {"street_name", "event_id", "split", "timestamp", "start", "end"}
_INT_COLUMNS = {"segment_id", "gauge_id"}


def _read_csv(path: PathLike, columns: List[str]) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"{path} does not exist")
    try:
        frame = pd.read_csv(
            path,
            dtype={c: str for c in columns if c in _STRING_COLUMNS},
            keep_default_na=False,
            float_precision="round_trip",
        )
    except pd.errors.ParserError as e:
        raise SchemaMismatchError(f"{path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise SchemaMismatchError(f"{path} is empty") from e
    if list(frame.columns) != columns:
        raise SchemaMismatchError(
            f"{path}: expected columns {columns}, got {list(frame.columns)}"
        )
    for column in columns:
        if column in _STRING_COLUMNS:
            continue
        try:
            values = pd.to_numeric(frame[column], errors="raise")
        except (ValueError, TypeError) as e:
            raise SchemaMismatchError(f"{path}: column {column!r}: {e}") from e
        if values.isna().any():
            raise SchemaMismatchError(f"{path}: column {column!r} has empty cells")
        if column in _INT_COLUMNS:
            if not np.all(np.mod(values.to_numpy(dtype=float), 1) == 0):
                raise SchemaMismatchError(f"{path}: {column!r} must hold integers")
            frame[column] = values.astype("int64")
        else:
            frame[column] = values.astype("float64")
            if not np.isfinite(frame[column].to_numpy()).all():
                raise NonFiniteValueError(
                    f"{path}: column {column!r} holds a non-finite value"
                )
    for column in ("timestamp", "start", "end"):
        if column in frame.columns:
            try:
                frame[column] = pd.to_datetime(frame[column], format="ISO8601")
            except (ValueError, TypeError) as e:
                raise SchemaMismatchError(f"{path}: column {column!r}: {e}") from e
    return frame


def _check_unique(frame: pd.DataFrame, keys: Sequence[str], path: PathLike) -> None:
    duplicated = frame.duplicated(subset=list(keys), keep=False)
    if duplicated.any():
        first = frame.loc[duplicated, list(keys)].iloc[0].tolist()
        raise DuplicateIdError(f"{path}: duplicate {tuple(keys)} = {first}")


def load_study_area(
    segments_path: PathLike, gauges_path: PathLike
) -> Tuple[List[StreetSegment], List[RainGauge]]:
    """Load the static segment and gauge tables."""
    segments_frame = _read_csv(segments_path, SEGMENT_COLUMNS)
    _check_unique(segments_frame, ["segment_id"], segments_path)
    gauges_frame = _read_csv(gauges_path, GAUGE_COLUMNS)
    _check_unique(gauges_frame, ["gauge_id"], gauges_path)
    try:
        segments = [
            StreetSegment(**row) for row in segments_frame.to_dict(orient="records")
        ]
        gauges = [RainGauge(**row) for row in gauges_frame.to_dict(orient="records")]
    except ValidationError as e:
        raise SchemaMismatchError(str(e)) from e
    logger.debug(
        "Loaded %d segments from %s and %d gauges from %s",
        len(segments),
        segments_path,
        len(gauges),
        gauges_path,
    )
    return segments, gauges


def load_events(events_manifest_path: PathLike) -> List[RainfallEvent]:
    frame = _read_csv(events_manifest_path, EVENT_COLUMNS)
    _check_unique(frame, ["event_id"], events_manifest_path)
    try:
        return [
            RainfallEvent(
                event_id=row["event_id"],
                start=row["start"].to_pydatetime(),
                end=row["end"].to_pydatetime(),
                split=row["split"],
            )
            for row in frame.to_dict(orient="records")
        ]
    except ValidationError as e:
        raise SchemaMismatchError(f"{events_manifest_path}: {e}") from e


def _window(
    series: pd.Series, index: pd.DatetimeIndex, what: str, event_id: str
) -> pd.Series:
    missing = index.difference(series.index)
    if len(missing):
        raise CoverageGapError(
            f"event {event_id}: {what} has no value at {missing[0].isoformat()}"
        )
    return series.loc[index]


def load_event_series(
    raw_rain_path: PathLike,
    tide_path: PathLike,
    events_manifest_path: PathLike,
    event_ids: Optional[Iterable[str]] = None,
    min_usable_hours: int = MIN_USABLE_HOURS,
) -> Dict[str, EventSeries]:
    """Load every event's rain and tide, each trimmed exactly to its window.

    Events lasting ``min_usable_hours`` or less are returned with
    ``usable=False``.
    """
    events = load_events(events_manifest_path)
    by_id = {e.event_id: e for e in events}
    if event_ids is not None:
        wanted = list(event_ids)
        for event_id in wanted:
            if event_id not in by_id:
                raise UnknownEventError(f"unknown event {event_id!r}")
        events = [by_id[event_id] for event_id in wanted]

    rain = _read_csv(raw_rain_path, RAIN_COLUMNS)
    _check_unique(rain, ["gauge_id", "timestamp"], raw_rain_path)
    if (rain["rain_mm"] < 0).any():
        raise SchemaMismatchError(f"{raw_rain_path}: rain_mm must be >= 0")
    tide_frame = _read_csv(tide_path, TIDE_COLUMNS)
    _check_unique(tide_frame, ["timestamp"], tide_path)
    tide = tide_frame.set_index("timestamp")["td_hr_m"].sort_index()
    rain_by_gauge = {
        int(gauge_id): group.set_index("timestamp")["rain_mm"].sort_index()
        for gauge_id, group in rain.groupby("gauge_id", sort=True)
    }

    result: Dict[str, EventSeries] = {}
    for event in events:
        hours = event.hours()
        quarters = event.quarters()
        event_tide = _window(tide, hours, "tide", event.event_id)
        event_rain = {
            gauge_id: _window(series, quarters, f"gauge {gauge_id}", event.event_id)
            for gauge_id, series in rain_by_gauge.items()
        }
        usable = event.duration_hrs > min_usable_hours
        if not usable:
            logger.warning(
                "Event %s lasts %d hours: loaded but unusable for training",
                event.event_id,
                event.duration_hrs,
            )
        result[event.event_id] = EventSeries(
            event=event, rain=event_rain, tide=event_tide, usable=usable
        )
    return result


def _format_float(value: float) -> str:
    return np.format_float_positional(value, unique=True, trim="0")


def _to_csv(frame: pd.DataFrame, columns: List[str], path: Path) -> None:
    out = frame.loc[:, columns].copy()
    for column in columns:
        if column in ("timestamp", "start", "end"):
            out[column] = pd.to_datetime(out[column]).dt.strftime(TIMESTAMP_FORMAT)
        elif column in _INT_COLUMNS:
            out[column] = out[column].astype("int64")
        elif column not in _STRING_COLUMNS:
            out[column] = [_format_float(float(v)) for v in out[column]]
    try:
        out.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise IoFailureError(f"cannot write {path}: {e}") from e


def _series_frames(
    series: Dict[str, EventSeries]
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    rain_parts = []
    tide_parts = []
    for event_series in series.values():
        for gauge_id, values in event_series.rain.items():
            rain_parts.append(
                pd.DataFrame(
                    {
                        "gauge_id": gauge_id,
                        "timestamp": values.index,
                        "rain_mm": values.to_numpy(dtype=float),
                    }
                )
            )
        tide_parts.append(
            pd.DataFrame(
                {
                    "timestamp": event_series.tide.index,
                    "td_hr_m": event_series.tide.to_numpy(dtype=float),
                }
            )
        )
    rain = (
        pd.concat(rain_parts, ignore_index=True)
        if rain_parts
        else pd.DataFrame(columns=RAIN_COLUMNS)
    )
    tide = (
        pd.concat(tide_parts, ignore_index=True)
        if tide_parts
        else pd.DataFrame(columns=TIDE_COLUMNS)
    )
    # Overlapping event windows share rows, they must agree.
    rain = rain.drop_duplicates().sort_values(["gauge_id", "timestamp"])
    tide = tide.drop_duplicates().sort_values("timestamp")
    _check_unique(rain, ["gauge_id", "timestamp"], RAIN_FILE)
    _check_unique(tide, ["timestamp"], TIDE_FILE)
    return rain.reset_index(drop=True), tide.reset_index(drop=True)


def _check_foreign_keys(
    dataset: FloodDataset, rain: pd.DataFrame, tide: pd.DataFrame
) -> None:
    segment_ids = {s.segment_id for s in dataset.area.segments}
    gauge_ids = {g.gauge_id for g in dataset.area.gauges}
    if len(segment_ids) != len(dataset.area.segments):
        raise DuplicateIdError("duplicate segment_id in study area")
    if len(gauge_ids) != len(dataset.area.gauges):
        raise DuplicateIdError("duplicate gauge_id in study area")
    unknown_gauges = set(rain["gauge_id"].astype(int)) - gauge_ids
    if unknown_gauges:
        raise ForeignKeyError(
            f"rain rows reference unknown gauges {sorted(unknown_gauges)}"
        )
    tide_stamps = set(pd.to_datetime(tide["timestamp"]))
    for name, frame in (("weather", dataset.weather), ("depths", dataset.depths)):
        if frame is None:
            continue
        unknown = set(frame["segment_id"].astype(int)) - segment_ids
        if unknown:
            raise ForeignKeyError(
                f"{name} rows reference unknown segments {sorted(unknown)[:5]}"
            )
        orphans = set(pd.to_datetime(frame["timestamp"])) - tide_stamps
        if orphans:
            raise ForeignKeyError(
                f"{name} rows at {min(orphans).isoformat()} have no tide row"
            )
        _check_unique(frame, ["segment_id", "timestamp"], name)


def save_relational(dataset: FloodDataset, out_dir: PathLike) -> List[Path]:
    """Write every table of ``dataset`` in ``out_dir``.

    Foreign keys are checked before anything is written.
    """
    out = Path(out_dir)
    rain, tide = _series_frames(dataset.series)
    _check_foreign_keys(dataset, rain, tide)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailureError(f"cannot create {out}: {e}") from e

    events = pd.DataFrame(
        [
            {"event_id": e.event_id, "start": e.start, "end": e.end, "split": e.split}
            for e in dataset.events
        ],
        columns=EVENT_COLUMNS,
    )
    written = []
    for frame, columns, name in (
        (dataset.area.segment_frame(), SEGMENT_COLUMNS, SEGMENTS_FILE),
        (dataset.area.gauge_frame(), GAUGE_COLUMNS, GAUGES_FILE),
        (rain, RAIN_COLUMNS, RAIN_FILE),
        (tide, TIDE_COLUMNS, TIDE_FILE),
        (events, EVENT_COLUMNS, EVENTS_FILE),
    ):
        _to_csv(frame, columns, out / name)
        written.append(out / name)
    for frame, columns, name in (
        (dataset.weather, WEATHER_COLUMNS, WEATHER_FILE),
        (dataset.depths, DEPTH_COLUMNS, DEPTHS_FILE),
    ):
        if frame is not None:
            ordered = frame.sort_values(["segment_id", "timestamp"])
            _to_csv(ordered, columns, out / name)
            written.append(out / name)
    if dataset.manifest:
        try:
            (out / MANIFEST_FILE).write_text(
                json.dumps(dataset.manifest, indent=2, sort_keys=True) + "\n"
            )
        except OSError as e:
            raise IoFailureError(f"cannot write manifest: {e}") from e
        written.append(out / MANIFEST_FILE)
    logger.info("Wrote %d files in %s", len(written), out)
    return written


def save_table(frame: pd.DataFrame, columns: List[str], path: PathLike) -> Path:
    """Write one per-(segment, hour) table in the layout of :func:`load_table`."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailureError(f"cannot create {path.parent}: {e}") from e
    _to_csv(frame.sort_values(["segment_id", "timestamp"]), columns, path)
    return path


def load_table(path: PathLike, columns: List[str]) -> pd.DataFrame:
    """Load one of the per-(segment, hour) tables (weather or depths)."""
    frame = _read_csv(path, columns)
    _check_unique(frame, ["segment_id", "timestamp"], path)
    return frame.sort_values(["segment_id", "timestamp"]).reset_index(drop=True)


def load_relational(data_dir: PathLike) -> FloodDataset:
    """Load a whole directory written by :func:`save_relational`."""
    root = Path(data_dir)
    segments, gauges = load_study_area(root / SEGMENTS_FILE, root / GAUGES_FILE)
    events = load_events(root / EVENTS_FILE)
    series = load_event_series(root / RAIN_FILE, root / TIDE_FILE, root / EVENTS_FILE)
    weather = (
        load_table(root / WEATHER_FILE, WEATHER_COLUMNS)
        if (root / WEATHER_FILE).is_file()
        else None
    )
    depths = (
        load_table(root / DEPTHS_FILE, DEPTH_COLUMNS)
        if (root / DEPTHS_FILE).is_file()
        else None
    )
    manifest = (
        json.loads((root / MANIFEST_FILE).read_text())
        if (root / MANIFEST_FILE).is_file()
        else {}
    )
    dataset = FloodDataset(
        area=StudyArea(segments=segments, gauges=gauges),
        events=events,
        series=series,
        weather=weather,
        depths=depths,
        manifest=manifest,
    )
    rain, tide = _series_frames(series)
    _check_foreign_keys(dataset, rain, tide)
    return dataset

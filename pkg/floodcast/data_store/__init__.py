from .relational_store import (
    DEPTHS_FILE,
    EVENTS_FILE,
    GAUGES_FILE,
    MANIFEST_FILE,
    RAIN_FILE,
    SEGMENTS_FILE,
    TIDE_FILE,
    WEATHER_FILE,
    load_event_series,
    load_events,
    load_relational,
    load_study_area,
    load_table,
    save_relational,
    save_table,
)
from .tables import (
    DEPTH_COLUMNS,
    HOUR,
    MIN_USABLE_HOURS,
    QUARTER,
    WEATHER_COLUMNS,
    EventSeries,
    FloodDataset,
    RainfallEvent,
    RainGauge,
    StreetSegment,
    StudyArea,
)

__all__ = [
    "DEPTHS_FILE",
    "DEPTH_COLUMNS",
    "EVENTS_FILE",
    "EventSeries",
    "FloodDataset",
    "GAUGES_FILE",
    "HOUR",
    "MANIFEST_FILE",
    "MIN_USABLE_HOURS",
    "QUARTER",
    "RAIN_FILE",
    "RainGauge",
    "RainfallEvent",
    "SEGMENTS_FILE",
    "StreetSegment",
    "StudyArea",
    "TIDE_FILE",
    "WEATHER_COLUMNS",
    "WEATHER_FILE",
    "load_event_series",
    "load_events",
    "load_relational",
    "load_study_area",
    "load_table",
    "save_relational",
    "save_table",
]

"""In-memory tables of a study area and its rainfall events.

Static descriptors (segments, gauges, events) are immutable pydantic models.
Time series stay pandas objects indexed by timestamp: a rain series holds one
value per quarter hour, a tide series one value per hour.
"""
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Dict, List, Literal, Optional, Sequence

import pandas as pd
from pydantic import (
    BaseModel,
    ConfigDict,
    ValidationInfo,
    field_validator,
    model_validator,
)

from floodcast.errors import UnknownEventError

HOUR = pd.Timedelta(hours=1)
QUARTER = pd.Timedelta(minutes=15)
QUARTERS_PER_HOUR = 4
MIN_USABLE_HOURS = 5
"""Events this short (or shorter) are kept but never used for training."""

SEGMENT_COLUMNS = ["segment_id", "x_m", "y_m", "street_name", "elv_m", "twi", "dtw_cm"]
GAUGE_COLUMNS = ["gauge_id", "x_m", "y_m"]
RAIN_COLUMNS = ["gauge_id", "timestamp", "rain_mm"]
TIDE_COLUMNS = ["timestamp", "td_hr_m"]
EVENT_COLUMNS = ["event_id", "start", "end", "split"]
WEATHER_COLUMNS = ["segment_id", "timestamp", "rh_mm", "max15_mm", "hr2_mm", "hr72_mm"]
DEPTH_COLUMNS = ["segment_id", "timestamp", "depth_m"]


def _finite(value: float, name: str) -> float:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


class StreetSegment(BaseModel):
    """Static description of one 50 m road segment."""

    model_config = ConfigDict(frozen=True)

    segment_id: int
    x_m: float
    y_m: float
    street_name: str = ""
    elv_m: float
    twi: float
    dtw_cm: float

    @field_validator("x_m", "y_m", "elv_m", "twi", "dtw_cm")
    @classmethod
    def _check_finite(cls, value: float, info: ValidationInfo) -> float:
        return _finite(value, info.field_name)

    @field_validator("dtw_cm")
    @classmethod
    def _check_dtw(cls, value: float) -> float:
        if value < 0:
            raise ValueError(f"dtw_cm must be >= 0, got {value}")
        return value


class RainGauge(BaseModel):
    model_config = ConfigDict(frozen=True)

    gauge_id: int
    x_m: float
    y_m: float

    @field_validator("x_m", "y_m")
    @classmethod
    def _check_finite(cls, value: float, info: ValidationInfo) -> float:
        return _finite(value, info.field_name)


class RainfallEvent(BaseModel):
    """One storm window, both ends inclusive, on the hourly grid."""

    model_config = ConfigDict(frozen=True)

    event_id: str
    start: datetime
    end: datetime
    split: Literal["train", "test"]

    @model_validator(mode="after")
    def _check_window(self) -> "RainfallEvent":
        if self.end < self.start:
            raise ValueError(f"event {self.event_id}: end {self.end} before start")
        for stamp in (self.start, self.end):
            if stamp.minute or stamp.second or stamp.microsecond:
                raise ValueError(f"event {self.event_id}: {stamp} is not on the hour")
        return self

    @property
    def duration_hrs(self) -> int:
        return int((self.end - self.start) / timedelta(hours=1)) + 1

    def hours(self) -> pd.DatetimeIndex:
        return pd.date_range(self.start, self.end, freq=HOUR)

    def quarters(self) -> pd.DatetimeIndex:
        return pd.date_range(
            self.start, pd.Timestamp(self.end) + 3 * QUARTER, freq=QUARTER
        )

    @property
    def usable(self) -> bool:
        return self.duration_hrs > MIN_USABLE_HOURS

    def usable_for(self, look_back: int) -> bool:
        return self.usable and self.duration_hrs > look_back


class StudyArea(BaseModel):
    model_config = ConfigDict(frozen=True)

    segments: List[StreetSegment]
    gauges: List[RainGauge]

    def segment_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [s.model_dump() for s in self.segments], columns=SEGMENT_COLUMNS
        )

    def gauge_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [g.model_dump() for g in self.gauges], columns=GAUGE_COLUMNS
        )

    def subset(self, segment_ids: Sequence[int]) -> "StudyArea":
        wanted = set(segment_ids)
        return StudyArea(
            segments=[s for s in self.segments if s.segment_id in wanted],
            gauges=self.gauges,
        )


@dataclass(frozen=True)
class EventSeries:
    """Raw forcing of one event: quarter-hour rain per gauge and hourly tide."""

    event: RainfallEvent
    rain: Dict[int, pd.Series]
    tide: pd.Series
    usable: bool = True


@dataclass
class FloodDataset:
    """Every table of the relational layout, held in memory."""

    area: StudyArea
    events: List[RainfallEvent]
    series: Dict[str, EventSeries]
    weather: Optional[pd.DataFrame] = None
    depths: Optional[pd.DataFrame] = None
    manifest: Dict[str, object] = field(default_factory=dict)

    def event(self, event_id: str) -> RainfallEvent:
        for event in self.events:
            if event.event_id == event_id:
                return event
        raise UnknownEventError(f"unknown event {event_id!r}")

    def event_ids(
        self, split: Optional[str] = None, usable_only: bool = True
    ) -> List[str]:
        return [
            e.event_id
            for e in self.events
            if (split is None or e.split == split) and (e.usable or not usable_only)
        ]

"""Synthetic storms: quarter-hour gauge rain and the hourly tide."""
import math
from datetime import datetime, timedelta
from typing import List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from floodcast.data_store import EventSeries, RainfallEvent, StudyArea
from floodcast.errors import InvalidConfigError, InvalidDurationError

MIN_EVENT_HOURS = 6
DRY_QUARTERS = 8
"""Quarters forced dry at both ends of an event (two hours)."""
TIDE_EPOCH = datetime(2016, 1, 1)
AMPLITUDE_CORRELATION_M = 3000.0


class TideModel(BaseModel):
    """A single semidiurnal constituent plus a mean level, in meters."""

    model_config = ConfigDict(frozen=True)

    amplitude_m: float = Field(default=0.6, ge=0)
    offset_m: float = 0.3
    period_hrs: float = Field(default=12.42, gt=0)
    phase_hrs: float = 0.0

    def _hours(self, stamp: datetime) -> float:
        return (pd.Timestamp(stamp) - pd.Timestamp(TIDE_EPOCH)) / pd.Timedelta(
            hours=1
        )

    def level(self, t_hrs: np.ndarray) -> np.ndarray:
        """Tide at ``t_hrs`` hours after the tide epoch."""
        angle = 2 * np.pi * (np.asarray(t_hrs, dtype=float) - self.phase_hrs)
        return self.offset_m + self.amplitude_m * np.sin(angle / self.period_hrs)

    def series(self, event: RainfallEvent) -> pd.Series:
        hours = event.hours()
        t = np.array([self._hours(h) for h in hours])
        return pd.Series(self.level(t), index=hours, name="td_hr_m")

    def extrema(self, start: datetime, end: datetime) -> Tuple[float, float]:
        """Max and min of the continuous tide over ``[start, end]``.

        Evaluated at the analytic crests and troughs inside the window plus
        its two ends.
        """
        t0, t1 = self._hours(start), self._hours(end)
        quarter = self.period_hrs / 4
        candidates = [t0, t1]
        for offset in (quarter, 3 * quarter):
            k = math.ceil((t0 - self.phase_hrs - offset) / self.period_hrs)
            t = self.phase_hrs + offset + k * self.period_hrs
            while t <= t1:
                candidates.append(t)
                t += self.period_hrs
        levels = self.level(np.array(candidates))
        return float(levels.max()), float(levels.min())


def _gauge_factors(
    rng: np.random.Generator, area: StudyArea, n_pulses: int
) -> np.ndarray:
    """Smoothly varying amplitude factors in [0.6, 1.4], one row per pulse."""
    xy = np.array([[g.x_m, g.y_m] for g in area.gauges])
    factors = np.empty((n_pulses, len(xy)))
    for p in range(n_pulses):
        angle = rng.uniform(0, 2 * np.pi)
        phase = rng.uniform(0, 2 * np.pi)
        direction = np.array([np.cos(angle), np.sin(angle)])
        wave = np.cos(xy @ direction / AMPLITUDE_CORRELATION_M + phase)
        factors[p] = 1.0 + 0.4 * wave
    return factors


def gen_event(
    area: StudyArea,
    duration_hrs: int,
    peak_intensity_mm: float,
    seed: int,
    start: datetime = datetime(2016, 6, 5),
    event_id: str = "E01",
    split: Literal["train", "test"] = "train",
    tide: Optional[TideModel] = None,
) -> EventSeries:
    """Generate the rain of every gauge and the tide of one event.

    Rain is one to three Gaussian pulses in time whose amplitudes vary
    smoothly in space. The first and last two hours are dry. The largest
    quarter-hour value over all gauges equals ``peak_intensity_mm``.
    """
    if duration_hrs < MIN_EVENT_HOURS:
        raise InvalidDurationError(
            f"duration must be >= {MIN_EVENT_HOURS} hours, got {duration_hrs}"
        )
    if not peak_intensity_mm >= 0:
        raise InvalidConfigError(
            f"peak_intensity_mm must be >= 0, got {peak_intensity_mm}"
        )
    event = RainfallEvent(
        event_id=event_id,
        start=start,
        end=start + timedelta(hours=duration_hrs - 1),
        split=split,
    )
    return storm_series(area, event, peak_intensity_mm, seed, tide)


def storm_series(
    area: StudyArea,
    event: RainfallEvent,
    peak_intensity_mm: float,
    seed: int,
    tide: Optional[TideModel] = None,
) -> EventSeries:
    """Rain and tide over the window of ``event``, whatever its length."""
    duration_hrs = event.duration_hrs
    rng = np.random.default_rng(seed)
    n_quarters = 4 * duration_hrs
    dry = min(DRY_QUARTERS, (n_quarters - 1) // 2)
    wet = np.arange(dry, n_quarters - dry)
    n_pulses = int(rng.integers(1, 4))
    centers = rng.uniform(wet[0], wet[-1], n_pulses)
    widths = rng.uniform(2.0, max(2.0, len(wet) / 4), n_pulses)
    weights = rng.uniform(0.4, 1.0, n_pulses)
    factors = _gauge_factors(rng, area, n_pulses)

    q = np.arange(n_quarters, dtype=float)
    shapes = weights[:, None] * np.exp(
        -0.5 * ((q[None, :] - centers[:, None]) / widths[:, None]) ** 2
    )
    rain = factors.T @ shapes
    rain[:, :dry] = 0.0
    rain[:, n_quarters - dry :] = 0.0
    peak = rain.max()
    rain = rain * (peak_intensity_mm / peak) if peak > 0 else rain

    quarters = event.quarters()
    series = {
        gauge.gauge_id: pd.Series(rain[j], index=quarters, name="rain_mm")
        for j, gauge in enumerate(area.gauges)
    }
    tide_model = tide or TideModel()
    return EventSeries(
        event=event,
        rain=series,
        tide=tide_model.series(event),
        usable=event.usable,
    )


class RosterEntry(BaseModel):
    """One storm of an event roster."""

    model_config = ConfigDict(frozen=True)

    event_id: str
    start: datetime
    duration_hrs: int
    total_rain_mm: float
    split: Literal["train", "test"]

    @property
    def peak_intensity_mm(self) -> float:
        return 0.05 * self.total_rain_mm

    def event(self) -> RainfallEvent:
        return RainfallEvent(
            event_id=self.event_id,
            start=self.start,
            end=self.start + timedelta(hours=self.duration_hrs - 1),
            split=self.split,
        )


def _entry(
    event_id: str, start: str, duration: int, total: float, split: str
) -> RosterEntry:
    return RosterEntry(
        event_id=event_id,
        start=datetime.fromisoformat(start),
        duration_hrs=duration,
        total_rain_mm=total,
        split=split,  # type: ignore[arg-type]
    )


# Sixteen usable storms of a coastal city record; SHORT_EVENT is too short to
# train on.
REFERENCE_ROSTER: List[RosterEntry] = [
    _entry("E01", "2016-06-05T12:00:00", 28, 78.7, "train"),
    _entry("E02", "2016-07-30T06:00:00", 34, 200.7, "train"),
    _entry("E03", "2016-08-09T04:00:00", 16, 37.9, "train"),
    _entry("E04", "2016-09-02T10:00:00", 28, 109.8, "train"),
    _entry("E05", "2016-09-19T08:00:00", 60, 329.9, "train"),
    _entry("E06", "2016-10-08T03:00:00", 37, 328.5, "train"),
    _entry("E07", "2017-01-01T06:00:00", 23, 55.2, "train"),
    _entry("E08", "2017-07-14T12:00:00", 22, 132.1, "train"),
    _entry("E09", "2017-08-07T02:00:00", 34, 117.9, "train"),
    _entry("E10", "2017-08-28T06:00:00", 25, 107.0, "train"),
    _entry("E11", "2017-10-29T04:00:00", 29, 57.3, "test"),
    _entry("E12", "2018-05-06T00:00:00", 24, 82.8, "test"),
    _entry("E13", "2018-05-28T08:00:00", 26, 98.6, "test"),
    _entry("E14", "2018-06-21T12:00:00", 37, 96.3, "train"),
    _entry("E15", "2018-07-30T08:00:00", 11, 70.0, "train"),
    _entry("E16", "2018-08-11T00:00:00", 24, 58.2, "test"),
]
SHORT_EVENT = _entry("E17", "2018-08-20T10:00:00", 5, 61.3, "train")
REFERENCE_DURATIONS = [e.duration_hrs for e in REFERENCE_ROSTER]


def make_roster(
    n_events: int = len(REFERENCE_ROSTER),
    test_fraction: float = 0.25,
    include_short_event: bool = False,
) -> List[RosterEntry]:
    """Event roster of ``n_events`` storms.

    Sixteen events with the default test fraction give the reference roster.
    Other counts cycle through its durations and rain totals, one storm a
    week, the last ``round(n_events * test_fraction)`` events (at least one)
    held out for test.
    """
    if n_events < 1:
        raise InvalidConfigError(f"n_events must be >= 1, got {n_events}")
    if not 0 < test_fraction < 1:
        raise InvalidConfigError(
            f"test_fraction must be in (0, 1), got {test_fraction}"
        )
    if n_events == len(REFERENCE_ROSTER) and test_fraction == 0.25:
        roster = list(REFERENCE_ROSTER)
    else:
        n_test = max(1, round(n_events * test_fraction))
        first = REFERENCE_ROSTER[0].start
        roster = [
            RosterEntry(
                event_id=f"E{i + 1:02d}",
                start=first + timedelta(days=7 * i),
                duration_hrs=REFERENCE_DURATIONS[i % 16],
                total_rain_mm=REFERENCE_ROSTER[i % 16].total_rain_mm,
                split="test" if i >= n_events - n_test else "train",
            )
            for i in range(n_events)
        ]
    if include_short_event:
        latest = max(e.start for e in roster)
        start = max(SHORT_EVENT.start, latest + timedelta(days=7))
        roster.append(
            SHORT_EVENT.model_copy(
                update={"event_id": f"E{len(roster) + 1:02d}", "start": start}
            )
        )
    return roster

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from floodcast.data_store import EventSeries, FloodDataset
from floodcast.features import (
    EventFeatureTable,
    build_event_table,
    event_summary,
    weather_frame,
)

from .oracle import OracleParams, oracle_depths
from .storms import RosterEntry, TideModel, make_roster, storm_series
from .terrain import gen_study_area

logger = logging.getLogger(__name__)


def stream_seed(seed: int, *keys: int) -> int:
    """An independent integer seed derived from ``seed`` and ``keys``."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def gen_dataset(
    n_segments: int,
    n_gauges: int,
    seed: int,
    bounds_m: Tuple[float, float] = (5000.0, 5000.0),
    roster: Optional[Sequence[RosterEntry]] = None,
    oracle: Optional[OracleParams] = None,
    tide: Optional[TideModel] = None,
    idw_power: float = 2.0,
) -> FloodDataset:
    """A complete synthetic dataset: area, storms, weather and oracle depths."""
    roster = list(roster) if roster is not None else make_roster()
    oracle = oracle or OracleParams()
    tide = tide or TideModel()
    area = gen_study_area(n_segments, n_gauges, bounds_m, seed=stream_seed(seed, 0))

    series: Dict[str, EventSeries] = {}
    tables: List[EventFeatureTable] = []
    depths = []
    summaries = {}
    for k, entry in enumerate(roster):
        event_series = storm_series(
            area,
            entry.event(),
            entry.peak_intensity_mm,
            seed=stream_seed(seed, 1, k),
            tide=tide,
        )
        series[entry.event_id] = event_series
        table = build_event_table(event_series, area, power=idw_power)
        tables.append(table)
        depths.append(oracle_depths(area, table, oracle))
        summaries[entry.event_id] = {
            **event_summary(table),
            "split": entry.split,
            "usable": event_series.usable,
        }
    logger.info(
        "Generated %d segments, %d gauges and %d events (seed=%d)",
        n_segments,
        n_gauges,
        len(roster),
        seed,
    )
    return FloodDataset(
        area=area,
        events=[s.event for s in series.values()],
        series=series,
        weather=weather_frame(tables),
        depths=pd.concat(depths, ignore_index=True),
        manifest={
            "seed": seed,
            "n_segments": n_segments,
            "n_gauges": n_gauges,
            "bounds_m": list(area.bounds_m),
            "idw_power": idw_power,
            "oracle_params": oracle.model_dump(),
            "tide": tide.model_dump(),
            "events": summaries,
        },
    )

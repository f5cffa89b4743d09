from .dataset import gen_dataset, stream_seed
from .oracle import OracleParams, oracle_depths, select_flood_prone
from .storms import (
    REFERENCE_DURATIONS,
    REFERENCE_ROSTER,
    SHORT_EVENT,
    RosterEntry,
    TideModel,
    gen_event,
    make_roster,
    storm_series,
)
from .terrain import MAX_ELEVATION_M, SyntheticArea, gen_study_area

__all__ = [
    "MAX_ELEVATION_M",
    "OracleParams",
    "REFERENCE_DURATIONS",
    "REFERENCE_ROSTER",
    "RosterEntry",
    "SHORT_EVENT",
    "SyntheticArea",
    "TideModel",
    "gen_dataset",
    "gen_event",
    "gen_study_area",
    "make_roster",
    "oracle_depths",
    "select_flood_prone",
    "storm_series",
    "stream_seed",
]
